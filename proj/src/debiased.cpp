#include "lsdml/debiased.hpp"

#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>

#include "lsdml/errors.hpp"
#include "lsdml/learners.hpp"
#include "lsdml/rng.hpp"

namespace lsdml {

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("normal_quantile: p must lie in (0, 1)");
  // Acklam's rational approximation (relative error about 1.2e-9).
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // One Halley step against the erfc-based CDF.
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

Partition split_indices(std::size_t n, std::uint64_t seed) {
  if (n < 8) throw InvalidArgument("split_indices: need at least 8 observations, got " + std::to_string(n));
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  auto eng = make_engine({seed, 0x5eed5011ULL});
  for (std::size_t i = n - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(eng, i + 1));
    std::swap(perm[i], perm[j]);
  }
  Partition part;
  std::size_t offset = 0;
  for (std::size_t k = 0; k < 4; ++k) {
    const std::size_t size = n / 4 + (k < n % 4 ? 1 : 0);
    part.folds[k].assign(perm.begin() + static_cast<std::ptrdiff_t>(offset),
                         perm.begin() + static_cast<std::ptrdiff_t>(offset + size));
    offset += size;
  }
  return part;
}

std::vector<FoldRoles> role_rotations(bool cross_fit) {
  std::vector<FoldRoles> out;
  const int count = cross_fit ? 4 : 1;
  for (int r = 0; r < count; ++r) out.push_back({r, (r + 1) % 4, (r + 2) % 4, (r + 3) % 4});
  return out;
}

ResolvedLambdas resolve_lambdas(const Lambdas& l, double beta, std::size_t n_primary, std::size_t n_weak) {
  ResolvedLambdas r;
  r.h = l.h.value_or(default_lambda(n_primary, beta));
  r.g = l.g.value_or(default_lambda(n_primary, beta));
  r.alpha_h = l.alpha_h.value_or(default_lambda(n_weak, beta));
  r.alpha_g = l.alpha_g.value_or(default_lambda(n_weak, beta));
  return r;
}

NuisanceTuple fit_nuisances(const Observations& primary, const Observations& weak_riesz,
                            const Observations& projection, const Observations& riesz,
                            const EstimatorConfig& config, const ResolvedLambdas& lambdas) {
  const BasisSpec& hs = config.hspace;
  const BasisSpec& gs = config.gspace;
  const CoefVector h = minimax_primary(primary, hs, gs, config.fp, lambdas.h).coef;
  const CoefVector g = minimax_dual(primary, hs, gs, config.fp, lambdas.g).coef;
  const CoefVector alpha_h = minimax_weak_riesz(weak_riesz, hs, gs, g, lambdas.alpha_h).coef;
  const CoefVector alpha_g = minimax_weak_riesz_dual(weak_riesz, hs, gs, h, lambdas.alpha_g).coef;
  return NuisanceTuple{
      .h = h,
      .g = g,
      .alpha_h = alpha_h,
      .alpha_g = alpha_g,
      .xi_h = projection_ls(projection, h, gs),
      .xi_g = projection_ls(projection, g, hs),
      .xi_alpha_h = projection_ls(projection, alpha_h, gs),
      .xi_alpha_g = projection_ls(projection, alpha_g, hs),
      .r = riesz_regression(riesz, gs, config.fp, RieszTarget::RHat),
      .a = riesz_regression(riesz, hs, config.fp, RieszTarget::AHat),
  };
}

namespace {

std::vector<Sample> gather(std::span<const Sample> data, const std::vector<std::size_t>& idx) {
  std::vector<Sample> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(data[i]);
  return out;
}

[[noreturn]] void rethrow_annotated(const std::string& where) {
  try {
    throw;
  } catch (const SingularSystem& e) {
    throw SingularSystem(std::string(e.what()) + " [" + where + "]", e.condition());
  } catch (const DimensionMismatch& e) {
    throw DimensionMismatch(std::string(e.what()) + " [" + where + "]");
  } catch (const DomainError& e) {
    throw DomainError(std::string(e.what()) + " [" + where + "]");
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(std::string(e.what()) + " [" + where + "]");
  }
}

double normal_z(double level) {
  if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("confidence level must lie in (0, 1)");
  return normal_quantile(0.5 + 0.5 * level);
}

}  // namespace

EstimateReport estimate(std::span<const Sample> data, const EstimatorConfig& config) {
  const double z = normal_z(config.level);
  const Partition part = split_indices(data.size(), config.seed);
  std::array<std::vector<Sample>, 4> folds;
  for (std::size_t k = 0; k < 4; ++k) folds[k] = gather(data, part.folds[k]);

  EstimateReport rep;
  rep.level = config.level;
  std::vector<std::vector<double>> scores;
  for (const FoldRoles& roles : role_rotations(config.cross_fit)) {
    const auto& d1 = folds[static_cast<std::size_t>(roles.primary)];
    const auto& d2 = folds[static_cast<std::size_t>(roles.weak_riesz)];
    const auto& d3 = folds[static_cast<std::size_t>(roles.projection)];
    const auto& d4 = folds[static_cast<std::size_t>(roles.evaluation)];
    std::vector<Sample> pooled(d1);
    pooled.insert(pooled.end(), d2.begin(), d2.end());
    pooled.insert(pooled.end(), d3.begin(), d3.end());

    NuisanceTuple eta = NuisanceTuple::zero(config.hspace, config.gspace);
    try {
      const ResolvedLambdas lam = resolve_lambdas(config.lambdas, config.beta, d1.size(), d2.size());
      eta = fit_nuisances(Observations(d1), Observations(d2), Observations(d3), Observations(pooled), config,
                          lam);
    } catch (const Error&) {
      std::ostringstream where;
      where << "rotation with primary fold " << roles.primary << ", weak-Riesz fold " << roles.weak_riesz
            << ", projection fold " << roles.projection;
      rethrow_annotated(where.str());
    }

    std::vector<double> s;
    s.reserve(d4.size());
    try {
      for (const auto& w : d4) s.push_back(score(w, eta, config.fp));
    } catch (const Error&) {
      rethrow_annotated("evaluation fold " + std::to_string(roles.evaluation));
    }
    const double mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
    double var = 0.0;
    for (double v : s) var += (v - mean) * (v - mean);
    var /= static_cast<double>(s.size());
    rep.per_fold.push_back({mean, var, s.size()});
    scores.push_back(std::move(s));
  }

  double psi = 0.0;
  for (const auto& f : rep.per_fold) psi += f.psi_hat;
  psi /= static_cast<double>(rep.per_fold.size());

  std::size_t n_eval = 0;
  double variance = 0.0;
  if (config.pooling == VariancePooling::Pooled) {
    for (const auto& s : scores) {
      for (double v : s) variance += (v - psi) * (v - psi);
      n_eval += s.size();
    }
    variance /= static_cast<double>(n_eval);
  } else {
    for (const auto& f : rep.per_fold) {
      variance += f.variance * static_cast<double>(f.n);
      n_eval += f.n;
    }
    variance /= static_cast<double>(n_eval);
  }

  rep.psi_hat = psi;
  rep.n_eval = n_eval;
  rep.std_error = std::sqrt(variance / static_cast<double>(n_eval));
  rep.ci_low = psi - z * rep.std_error;
  rep.ci_high = psi + z * rep.std_error;
  return rep;
}

EstimateReport evaluate_frozen(const Observations& eval, const NuisanceTuple& eta, const FunctionalPair& fp,
                               double level) {
  eta.validate();
  const double z = normal_z(level);
  if (eval.empty()) throw InvalidArgument("evaluate_frozen: no observations");
  std::vector<double> s(eval.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < eval.size(); ++i) {
    s[i] = score(eval.at(i), eta, fp);
    mean += eval.weight()[i] * s[i];
  }
  double var = 0.0;
  for (std::size_t i = 0; i < eval.size(); ++i) var += eval.weight()[i] * (s[i] - mean) * (s[i] - mean);

  const bool is_sample = !eval.is_population();
  EstimateReport rep;
  rep.psi_hat = mean;
  rep.level = level;
  rep.n_eval = is_sample ? eval.size() : 1;
  rep.std_error = std::sqrt(var / static_cast<double>(rep.n_eval));
  rep.ci_low = mean - z * rep.std_error;
  rep.ci_high = mean + z * rep.std_error;
  rep.per_fold.push_back({mean, var, eval.size()});
  return rep;
}

std::string report_csv_header() { return "psi_hat,std_error,ci_low,ci_high,level,n_eval,per_fold"; }

std::string report_csv_row(const EstimateReport& r) {
  std::ostringstream os;
  os << std::setprecision(17) << r.psi_hat << ',' << r.std_error << ',' << r.ci_low << ',' << r.ci_high << ','
     << r.level << ',' << r.n_eval << ',';
  for (std::size_t k = 0; k < r.per_fold.size(); ++k) {
    if (k) os << ';';
    os << r.per_fold[k].psi_hat << ':' << r.per_fold[k].variance << ':' << r.per_fold[k].n;
  }
  return os.str();
}

void write_report_text(std::ostream& os, const EstimateReport& r) {
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << std::setprecision(6);
  os << "estimate        " << r.psi_hat << '\n'
     << "std. error      " << r.std_error << '\n'
     << "confidence      " << r.level * 100.0 << "%  [" << r.ci_low << ", " << r.ci_high << "]\n"
     << "n (evaluation)  " << r.n_eval << '\n';
  for (std::size_t k = 0; k < r.per_fold.size(); ++k) {
    os << "  rotation " << k << ": psi " << r.per_fold[k].psi_hat << ", score var " << r.per_fold[k].variance
       << ", n " << r.per_fold[k].n << '\n';
  }
  os.flags(flags);
  os.precision(prec);
}

}  // namespace lsdml
