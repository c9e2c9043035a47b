#include "lsdml/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "lsdml/errors.hpp"
#include "lsdml/learners.hpp"
#include "lsdml/rng.hpp"
#include "lsdml/svg_plot.hpp"

namespace lsdml {

namespace fs = std::filesystem;

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("loglog_slope needs two equal-length series");
  double mx = 0.0, my = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) throw DomainError("loglog_slope needs positive values");
    mx += std::log(x[i]) / n;
    my += std::log(y[i]) / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

std::vector<double> log_grid(double lo, double hi, int count) {
  if (!(lo > 0.0 && hi > lo) || count < 2) throw InvalidArgument("log_grid needs 0 < lo < hi and count >= 2");
  std::vector<double> out(static_cast<std::size_t>(count));
  const double a = std::log10(lo), b = std::log10(hi);
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = std::pow(10.0, a + (b - a) * i / (count - 1));
  return out;
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
  std::vector<std::exception_ptr> errors(count);
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
        break;
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    auto work = [&] {
      for (std::size_t i = next++; i < count && !failed; i = next++) {
        try {
          body(i);
        } catch (...) {
          errors[i] = std::current_exception();
          failed = true;
        }
      }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, count); ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

NuisanceTuple perturb(const NuisanceTuple& eta, double scale, std::mt19937_64& eng) {
  auto noisy = [&](const CoefVector& c) {
    Eigen::VectorXd d(c.size());
    for (int j = 0; j < c.size(); ++j) d[j] = scale * standard_normal(eng);
    return CoefVector(c.space(), c.coefficients() + d);
  };
  return NuisanceTuple{noisy(eta.h),    noisy(eta.g),    noisy(eta.alpha_h),    noisy(eta.alpha_g),
                       noisy(eta.xi_h), noisy(eta.xi_g), noisy(eta.xi_alpha_h), noisy(eta.xi_alpha_g),
                       noisy(eta.r),    noisy(eta.a)};
}

TikhonovCurve tikhonov_curve(const OperatorMatrix& op, const OracleSolution& sol, std::span<const double> lambdas) {
  TikhonovCurve c;
  c.lambdas.assign(lambdas.begin(), lambdas.end());
  const auto hp = tikhonov_path(op, sol.r_P, lambdas, TikhonovSide::Primal);
  const auto gp = tikhonov_path(op, sol.a_P, lambdas, TikhonovSide::Dual);
  const auto ap = tikhonov_path(op, sol.g_dag, lambdas, TikhonovSide::WeakRieszPrimal);
  auto sq = [](double v) { return v * v; };
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const CoefVector dh = hp[i] - sol.h_dag;
    const CoefVector dg = gp[i] - sol.g_dag;
    const CoefVector da = ap[i] - sol.alpha_h_dag;
    c.h_strong_sq.push_back(sq(op.gram_h().norm(dh)));
    c.h_weak_sq.push_back(sq(op.gram_g().norm(op.apply(dh))));
    c.g_strong_sq.push_back(sq(op.gram_g().norm(dg)));
    c.g_weak_sq.push_back(sq(op.gram_h().norm(op.apply_adjoint(dg))));
    c.alpha_h_ratio.push_back(sq(op.gram_g().norm(op.apply(da))) / lambdas[i]);
  }
  c.h_strong_slope = loglog_slope(c.lambdas, c.h_strong_sq);
  c.h_weak_slope = loglog_slope(c.lambdas, c.h_weak_sq);
  c.g_strong_slope = loglog_slope(c.lambdas, c.g_strong_sq);
  c.g_weak_slope = loglog_slope(c.lambdas, c.g_weak_sq);
  return c;
}

LearnerErrors learner_errors(const RealizedDGP& dgp, const OperatorMatrix& op, const OracleSolution& sol,
                             const EstimatorConfig& est, std::size_t n, std::uint64_t seed) {
  const Observations obs(sample(dgp.pmf, n, seed));
  const BasisSpec& hs = est.hspace;
  const BasisSpec& gs = est.gspace;
  const double lam = est.lambdas.h.value_or(default_lambda(n, est.beta));
  const double lam_g = est.lambdas.g.value_or(default_lambda(n, est.beta));
  const double lam_a = est.lambdas.alpha_h.value_or(default_lambda(n, est.beta));
  auto sq = [](double v) { return v * v; };

  LearnerErrors e;
  e.n = n;
  e.lambda = lam;
  const CoefVector dh = minimax_primary(obs, hs, gs, est.fp, lam).coef - sol.h_dag;
  e.h_strong = sq(op.gram_h().norm(dh));
  e.h_weak = sq(op.gram_g().norm(op.apply(dh)));
  const CoefVector dg = minimax_dual(obs, hs, gs, est.fp, lam_g).coef - sol.g_dag;
  e.g_weak = sq(op.gram_h().norm(op.apply_adjoint(dg)));
  const CoefVector da = minimax_weak_riesz(obs, hs, gs, sol.g_dag, lam_a).coef - sol.alpha_h_dag;
  e.alpha_h_weak = sq(op.gram_g().norm(op.apply(da)));
  e.xi_h = sq(op.gram_g().norm(projection_ls(obs, sol.h_dag, gs) - sol.xi_h));
  e.r = sq(op.gram_g().norm(riesz_regression(obs, gs, est.fp, RieszTarget::RHat) - sol.r_P));
  e.a = sq(op.gram_h().norm(riesz_regression(obs, hs, est.fp, RieszTarget::AHat) - sol.a_P));
  return e;
}

std::vector<CoverageRow> coverage_rows(const RealizedDGP& dgp, const EstimatorSettings& settings,
                                       std::span<const std::size_t> n_grid, int reps, std::uint64_t seed,
                                       int threads) {
  const auto domain = static_cast<std::uint64_t>(dgp.meta.seed_domain);
  const auto r = static_cast<std::size_t>(reps);
  std::vector<CoverageRow> rows(n_grid.size() * r);
  parallel_for(rows.size(), threads, [&](std::size_t k) {
    const std::size_t n = n_grid[k / r];
    const int rep = static_cast<int>(k % r);
    const auto data = sample(dgp.pmf, n, derive_seed({seed, domain, n, static_cast<std::uint64_t>(rep), 0}));
    const EstimatorConfig est = make_estimator_config(
        settings, dgp, derive_seed({seed, domain, n, static_cast<std::uint64_t>(rep), 1}));
    rows[k] = CoverageRow{n, rep, estimate(data, est)};
  });
  return rows;
}

namespace {

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

/// Short human-readable number; magnitudes below 1e-12 print as 0.
std::string brief(double v) {
  if (std::abs(v) < 1e-12) return "0";
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

class OutputDir {
 public:
  explicit OutputDir(const std::string& dir) : dir_(dir) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  }

  std::string write(const std::string& name, const std::string& content) const {
    const fs::path p = dir_ / name;
    std::ofstream out(p, std::ios::binary);
    out << content;
    out.close();
    if (!out) throw IoError("cannot write '" + p.string() + "'");
    return p.string();
  }

 private:
  fs::path dir_;
};

struct Oracle {
  EstimatorConfig est;
  OperatorMatrix op;
  OracleSolution sol;
};

Oracle make_oracle(const ExperimentConfig& c, const RealizedDGP& dgp) {
  EstimatorConfig est = make_estimator_config(c.estimator, dgp, c.seed);
  OperatorMatrix op = build_operator(dgp.pmf, est.hspace, est.gspace);
  OracleSolution sol = solve_oracle(op, dgp.pmf, est.fp);
  return Oracle{std::move(est), std::move(op), std::move(sol)};
}

void describe_dgp(std::ostream& os, const RealizedDGP& dgp) {
  os << "dgp: " << (dgp.meta.name.empty() ? "(unnamed)" : dgp.meta.name) << " (|X| = " << dgp.pmf.nx()
     << ", |Z| = " << dgp.pmf.nz() << ")\n";
  if (dgp.meta.beta) {
    os << "spectral design: beta = " << *dgp.meta.beta << ", r_perp_mass = " << dgp.meta.r_perp_mass
       << ", a_perp_mass = " << dgp.meta.a_perp_mass << ", realized in " << dgp.meta.iterations << " iterations\n";
  }
  os << "functionals: " << describe(dgp.fp) << "\n";
}

struct Artifacts {
  std::string csv, summary;
  Plot plot;
  std::string plot_name;
};

Artifacts oracle_inspect(const ExperimentConfig& c, const RealizedDGP& dgp, const OutputDir& out,
                         ExperimentOutput& result) {
  const Oracle o = make_oracle(c, dgp);
  Artifacts a;
  std::ostringstream csv, pmf_csv, s;
  write_oracle_csv(csv, o.sol);
  write_pmf_csv(pmf_csv, dgp.pmf);
  result.files.push_back(out.write("pmf.csv", pmf_csv.str()));
  a.csv = csv.str();

  const auto& gg = o.op.gram_g();
  const auto& gh = o.op.gram_h();
  describe_dgp(s, dgp);
  s << "H: " << describe(o.est.hspace) << "\nG: " << describe(o.est.gspace) << "\n";
  s << "Ψ(P) = " << brief(o.sol.psi) << "\n";
  s << "rank(T) = " << o.sol.rank << "\n";
  s << "singular values:";
  for (Eigen::Index i = 0; i < o.sol.singular_values.size(); ++i) s << ' ' << brief(o.sol.singular_values[i]);
  s << "\n";
  s << "‖r_P‖ = " << brief(gg.norm(o.sol.r_P)) << ", ‖r_∥‖ = " << brief(gg.norm(o.sol.r_parallel))
    << ", ‖r_⊥‖ = " << brief(gg.norm(o.sol.r_perp)) << "\n";
  s << "‖a_P‖ = " << brief(gh.norm(o.sol.a_P)) << ", ‖a_∥‖ = " << brief(gh.norm(o.sol.a_parallel))
    << ", ‖a_⊥‖ = " << brief(gh.norm(o.sol.a_perp)) << "\n";
  s << "exact primal solution: " << (gg.norm(o.sol.r_perp) > 1e-9 ? "no" : "yes") << "\n";
  s << "exact dual solution: " << (gh.norm(o.sol.a_perp) > 1e-9 ? "no" : "yes") << "\n";
  s << "source condition: " << (o.sol.source_condition_violated ? "violated" : "satisfied")
    << " (‖T α^h − g†‖ = " << brief(o.sol.alpha_h_residual) << ", ‖T* α^g − h†‖ = "
    << brief(o.sol.alpha_g_residual) << ")\n";
  s << "dim ker T = " << o.sol.kernel_H.size() << ", dim ker T* = " << o.sol.kernel_G.size() << "\n";
  a.summary = s.str();

  Series sv{"singular value", {}, {}, Series::Style::Bars};
  for (Eigen::Index i = 0; i < o.sol.singular_values.size(); ++i) {
    sv.x.push_back(static_cast<double>(i + 1));
    sv.y.push_back(o.sol.singular_values[i]);
  }
  a.plot = Plot{"Operator spectrum", "index", "singular value", false, false, {sv}, std::nullopt, std::nullopt};
  a.plot_name = "spectrum.svg";
  return a;
}

Artifacts bias_identity(const ExperimentConfig& c, const RealizedDGP& dgp) {
  const Oracle o = make_oracle(c, dgp);
  const NuisanceTuple anchor = o.sol.nuisances();
  const auto domain = static_cast<std::uint64_t>(dgp.meta.seed_domain);
  std::vector<double> scales(static_cast<std::size_t>(c.reps));
  std::vector<BiasReport> reports(scales.size());
  parallel_for(reports.size(), c.threads, [&](std::size_t k) {
    auto eng = make_engine({c.seed, domain, k, 0xb1a5ULL});
    scales[k] = std::pow(10.0, -3.0 + 3.0 * uniform01(eng));
    reports[k] = bias_identity_check(o.op, dgp.pmf, o.est.fp, perturb(anchor, scales[k], eng), o.sol);
  });

  Artifacts a;
  std::ostringstream csv, s;
  csv << "draw,scale,lhs,termA,termB,termC,residual\n";
  double max_res = 0.0, max_lhs = 0.0;
  Series lhs{"|lhs|", {}, {}, Series::Style::Points}, res{"residual", {}, {}, Series::Style::Points};
  for (std::size_t k = 0; k < reports.size(); ++k) {
    const auto& r = reports[k];
    csv << k << ',' << num(scales[k]) << ',' << num(r.lhs) << ',' << num(r.termA) << ',' << num(r.termB) << ','
        << num(r.termC) << ',' << num(r.residual) << '\n';
    max_res = std::max(max_res, r.residual);
    max_lhs = std::max(max_lhs, std::abs(r.lhs));
    lhs.x.push_back(scales[k]);
    lhs.y.push_back(std::abs(r.lhs));
    res.x.push_back(scales[k]);
    res.y.push_back(std::max(r.residual, 1e-18));
  }
  a.csv = csv.str();
  describe_dgp(s, dgp);
  s << "Ψ(P) = " << brief(o.sol.psi) << "\n";
  s << "perturbation draws: " << reports.size() << " (coefficient noise sd log-uniform in [1e-3, 1])\n";
  s << "max |lhs| = " << num(max_lhs) << "\n";
  s << "max residual |lhs - (A + B + C)| = " << num(max_res) << "\n";
  s << "identity holds to 1e-8: " << (max_res <= 1e-8 ? "yes" : "no") << "\n";
  a.summary = s.str();
  a.plot = Plot{"Bias expansion", "perturbation scale", "absolute value", true, true, {lhs, res}, std::nullopt,
                std::nullopt};
  a.plot_name = "bias_identity.svg";
  return a;
}

Artifacts tikhonov_rates(const ExperimentConfig& c, const RealizedDGP& dgp) {
  const Oracle o = make_oracle(c, dgp);
  const std::vector<double> lambdas = c.lambda_grid.empty() ? log_grid(1e-6, 1e-1, 26) : c.lambda_grid;
  const TikhonovCurve t = tikhonov_curve(o.op, o.sol, lambdas);

  Artifacts a;
  std::ostringstream csv, s;
  csv << "lambda,h_strong_sq,h_weak_sq,g_strong_sq,g_weak_sq,alpha_h_weak_ratio\n";
  for (std::size_t i = 0; i < lambdas.size(); ++i)
    csv << num(lambdas[i]) << ',' << num(t.h_strong_sq[i]) << ',' << num(t.h_weak_sq[i]) << ','
        << num(t.g_strong_sq[i]) << ',' << num(t.g_weak_sq[i]) << ',' << num(t.alpha_h_ratio[i]) << '\n';
  a.csv = csv.str();

  describe_dgp(s, dgp);
  s << "lambda range: [" << lambdas.front() << ", " << lambdas.back() << "], " << lambdas.size() << " points\n";
  s << std::setprecision(4);
  s << "slope of ||h^lambda - h_dag||^2: " << t.h_strong_slope << "\n";
  s << "slope of ||T(h^lambda - h_dag)||^2: " << t.h_weak_slope << "\n";
  s << "slope of ||g^lambda - g_dag||^2: " << t.g_strong_slope << "\n";
  s << "slope of ||T*(g^lambda - g_dag)||^2: " << t.g_weak_slope << "\n";
  if (dgp.meta.beta) {
    const double b = *dgp.meta.beta;
    s << "reference slopes: strong min(beta, 2) = " << std::min(b, 2.0) << ", weak min(beta + 1, 2) = "
      << std::min(b + 1.0, 2.0) << "\n";
  }
  a.summary = s.str();
  a.plot = Plot{"Tikhonov bias",
                "lambda",
                "squared error",
                true,
                true,
                {{"strong (h)", lambdas, t.h_strong_sq, Series::Style::Line},
                 {"weak (h)", lambdas, t.h_weak_sq, Series::Style::Line},
                 {"strong (g)", lambdas, t.g_strong_sq, Series::Style::Line},
                 {"weak (g)", lambdas, t.g_weak_sq, Series::Style::Line}},
                std::nullopt,
                std::nullopt};
  a.plot_name = "tikhonov_rates.svg";
  return a;
}

Artifacts learner_rates(const ExperimentConfig& c, const RealizedDGP& dgp) {
  const Oracle o = make_oracle(c, dgp);
  const std::vector<std::size_t> grid =
      c.n_grid.empty() ? std::vector<std::size_t>{500, 1000, 2000, 4000, 8000} : c.n_grid;
  const auto reps = static_cast<std::size_t>(c.reps);
  const auto domain = static_cast<std::uint64_t>(dgp.meta.seed_domain);
  std::vector<LearnerErrors> rows(grid.size() * reps);
  parallel_for(rows.size(), c.threads, [&](std::size_t k) {
    const std::size_t n = grid[k / reps];
    const auto rep = k % reps;
    rows[k] = learner_errors(dgp, o.op, o.sol, o.est, n, derive_seed({c.seed, domain, n, rep, 2}));
    rows[k].rep = static_cast<int>(rep);
  });

  using Field = double LearnerErrors::*;
  const std::pair<const char*, Field> fields[] = {
      {"h_strong_sq", &LearnerErrors::h_strong}, {"h_weak_sq", &LearnerErrors::h_weak},
      {"g_weak_sq", &LearnerErrors::g_weak},     {"alpha_h_weak_sq", &LearnerErrors::alpha_h_weak},
      {"xi_h_sq", &LearnerErrors::xi_h},         {"r_sq", &LearnerErrors::r},
      {"a_sq", &LearnerErrors::a}};

  Artifacts a;
  std::ostringstream csv, s;
  csv << "n,rep,lambda";
  for (const auto& f : fields) csv << ',' << f.first;
  csv << '\n';
  for (const auto& r : rows) {
    csv << r.n << ',' << r.rep << ',' << num(r.lambda);
    for (const auto& f : fields) csv << ',' << num(r.*(f.second));
    csv << '\n';
  }
  a.csv = csv.str();

  describe_dgp(s, dgp);
  s << "replications per n: " << reps << "\nmedian squared errors:\n" << std::setw(8) << "n";
  for (const auto& f : fields) s << std::setw(17) << f.first;
  s << '\n';
  std::vector<double> ns(grid.begin(), grid.end());
  std::vector<Series> series;
  std::vector<std::vector<double>> medians(std::size(fields));
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    s << std::setw(8) << grid[gi];
    for (std::size_t fi = 0; fi < std::size(fields); ++fi) {
      std::vector<double> v;
      for (std::size_t k = 0; k < reps; ++k) v.push_back(rows[gi * reps + k].*(fields[fi].second));
      medians[fi].push_back(median(v));
      s << std::setw(17) << std::setprecision(6) << medians[fi].back();
    }
    s << '\n';
  }
  s << "strictly decreasing medians:";
  for (std::size_t fi = 0; fi < std::size(fields); ++fi) {
    bool dec = true;
    for (std::size_t i = 1; i < grid.size(); ++i) dec = dec && medians[fi][i] < medians[fi][i - 1];
    // e.g. the a-learner when the weight lies in the sieve: error at rounding level for every n
    const bool exact = *std::max_element(medians[fi].begin(), medians[fi].end()) <= 1e-12;
    s << ' ' << fields[fi].first << '=' << (exact ? "exact" : dec ? "yes" : "no");
    series.push_back({fields[fi].first, ns, medians[fi], Series::Style::Line});
  }
  s << '\n';
  a.summary = s.str();
  a.plot = Plot{"Learner errors", "n", "median squared error", true, true, series, std::nullopt, std::nullopt};
  a.plot_name = "learner_rates.svg";
  return a;
}

Artifacts coverage(const ExperimentConfig& c, const RealizedDGP& dgp) {
  const Oracle o = make_oracle(c, dgp);
  const std::vector<std::size_t> grid = c.n_grid.empty() ? std::vector<std::size_t>{2000} : c.n_grid;
  const auto rows = coverage_rows(dgp, c.estimator, grid, c.reps, c.seed, c.threads);
  const double truth = o.sol.psi;

  Artifacts a;
  std::ostringstream csv, s;
  csv << "n,rep,psi_true,psi_hat,std_error,ci_low,ci_high,covers\n";
  for (const auto& r : rows)
    csv << r.n << ',' << r.rep << ',' << num(truth) << ',' << num(r.report.psi_hat) << ','
        << num(r.report.std_error) << ',' << num(r.report.ci_low) << ',' << num(r.report.ci_high) << ','
        << (r.report.covers(truth) ? 1 : 0) << '\n';
  a.csv = csv.str();

  describe_dgp(s, dgp);
  s << "Ψ(P) = " << brief(truth) << "\nnominal level = " << c.estimator.level << ", replications per n = " << c.reps
    << ", cross-fit = " << (c.estimator.cross_fit ? "yes" : "no") << "\n";
  Series bars{"coverage", {}, {}, Series::Style::Bars};
  const auto reps = static_cast<std::size_t>(c.reps);
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    double cover = 0.0, mean = 0.0, mean_se = 0.0;
    for (std::size_t k = 0; k < reps; ++k) {
      const auto& r = rows[gi * reps + k].report;
      cover += r.covers(truth) ? 1.0 : 0.0;
      mean += r.psi_hat;
      mean_se += r.std_error;
    }
    cover /= static_cast<double>(reps);
    mean /= static_cast<double>(reps);
    mean_se /= static_cast<double>(reps);
    double sd = 0.0;
    for (std::size_t k = 0; k < reps; ++k) sd += std::pow(rows[gi * reps + k].report.psi_hat - mean, 2);
    sd = reps > 1 ? std::sqrt(sd / static_cast<double>(reps - 1)) : 0.0;
    s << std::setprecision(6) << "n = " << grid[gi] << ": empirical coverage = " << cover << " (Monte Carlo se "
      << std::sqrt(cover * (1.0 - cover) / static_cast<double>(reps)) << "), mean estimate = " << mean
      << ", bias = " << mean - truth << ", sd of estimates = " << sd << ", mean std_error = " << mean_se << "\n";
    bars.x.push_back(static_cast<double>(grid[gi]));
    bars.y.push_back(cover);
  }
  a.summary = s.str();
  a.plot = Plot{"Interval coverage", "n", "coverage", grid.size() > 1, false, {bars}, c.estimator.level,
                std::make_pair(0.0, 1.0)};
  a.plot_name = "coverage.svg";
  return a;
}

Artifacts single_estimate(const ExperimentConfig& c, const RealizedDGP& dgp) {
  const Oracle o = make_oracle(c, dgp);
  std::vector<Sample> data;
  if (c.data_path) {
    data = read_samples_csv(*c.data_path);
  } else {
    const std::size_t n = c.n_grid.empty() ? 2000 : c.n_grid.front();
    data = sample(dgp.pmf, n, derive_seed({c.seed, static_cast<std::uint64_t>(dgp.meta.seed_domain), n, 0, 0}));
  }
  const EstimateReport r = estimate(data, o.est);

  Artifacts a;
  a.csv = report_csv_header() + "\n" + report_csv_row(r) + "\n";
  std::ostringstream s;
  describe_dgp(s, dgp);
  s << "observations: " << data.size() << (c.data_path ? " from " + *c.data_path : " drawn from the dgp") << "\n";
  write_report_text(s, r);
  s << "oracle Ψ(P) under the same bases = " << brief(o.sol.psi) << "\n";
  a.summary = s.str();
  Series folds{"rotation estimate", {}, {}, Series::Style::Points};
  for (std::size_t k = 0; k < r.per_fold.size(); ++k) {
    folds.x.push_back(static_cast<double>(k + 1));
    folds.y.push_back(r.per_fold[k].psi_hat);
  }
  Series ci{"interval", {0.5, 0.5}, {r.ci_low, r.ci_high}, Series::Style::Line};
  a.plot = Plot{"Debiased estimate", "rotation", "estimate", false, false, {folds, ci}, r.psi_hat, std::nullopt};
  a.plot_name = "estimate.svg";
  return a;
}

}  // namespace

std::vector<Sample> read_samples_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read data file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path + ": empty data file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x,y,z") throw ConfigError(path + ": expected header 'x,y,z'");
  std::vector<Sample> out;
  for (std::size_t row = 2; std::getline(in, line); ++row) {
    if (line.empty() || line == "\r") continue;
    std::istringstream ls(line);
    Sample w;
    char c1 = 0, c2 = 0;
    if (!(ls >> w.x >> c1 >> w.y >> c2 >> w.z) || c1 != ',' || c2 != ',' || !std::isfinite(w.x) ||
        !std::isfinite(w.y) || !std::isfinite(w.z))
      throw ConfigError(path + ":" + std::to_string(row) + ": expected three finite numbers");
    out.push_back(w);
  }
  return out;
}

ExperimentOutput run_experiment(const ExperimentConfig& config, ExperimentKind kind) {
  ExperimentOutput result;
  result.warnings = config_warnings(config);
  const RealizedDGP dgp = realize(config.dgp);
  const OutputDir out(config.out_dir);

  Artifacts a;
  switch (kind) {
    case ExperimentKind::OracleInspect: a = oracle_inspect(config, dgp, out, result); break;
    case ExperimentKind::BiasIdentity: a = bias_identity(config, dgp); break;
    case ExperimentKind::TikhonovRates: a = tikhonov_rates(config, dgp); break;
    case ExperimentKind::LearnerRates: a = learner_rates(config, dgp); break;
    case ExperimentKind::Coverage: a = coverage(config, dgp); break;
    case ExperimentKind::SingleEstimate: a = single_estimate(config, dgp); break;
  }
  result.files.push_back(out.write("results.csv", a.csv));
  result.files.push_back(out.write("summary.txt", a.summary));
  try {
    result.files.push_back(out.write(a.plot_name, render_svg(a.plot)));
  } catch (const std::exception& e) {
    result.warnings.push_back(std::string("plot skipped: ") + e.what());
  }
  result.summary = a.summary;
  return result;
}

}  // namespace lsdml
