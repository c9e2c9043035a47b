#include "lsdml/dgp.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "lsdml/errors.hpp"
#include "lsdml/oracle.hpp"
#include "lsdml/rng.hpp"

namespace lsdml {

namespace {

constexpr int kMaxIterations = 10000;
constexpr double kStep = 0.1;
constexpr double kSpectrumTol = 1e-8;
constexpr double kTailTol = 1e-12;

/// Orthonormal DCT-II vectors as columns; column 0 is constant.
Eigen::MatrixXd cosine_basis(int n) {
  Eigen::MatrixXd w(n, n);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) w(i, k) = std::cos(M_PI * k * (i + 0.5) / n);
    w.col(k).normalize();
  }
  return w;
}

struct SpectrumFit {
  double rel_error = 0.0;
  double tail = 0.0;
  Eigen::VectorXd values;
};

/// Whitened operator (Z rows, X columns) of a probability table indexed (x, z).
Eigen::MatrixXd whitened_of(const Eigen::MatrixXd& p) {
  const Eigen::VectorXd px = p.rowwise().sum();
  const Eigen::VectorXd pz = p.colwise().sum().transpose();
  return pz.cwiseSqrt().cwiseInverse().asDiagonal() * p.transpose() * px.cwiseSqrt().cwiseInverse().asDiagonal();
}

SpectrumFit compare(const Eigen::VectorXd& got, const std::vector<double>& target) {
  SpectrumFit fit;
  fit.values = got;
  const auto k = static_cast<Eigen::Index>(target.size());
  fit.rel_error = std::abs(got[0] - 1.0);
  for (Eigen::Index i = 0; i < k; ++i)
    fit.rel_error = std::max(fit.rel_error, std::abs(got[i + 1] - target[static_cast<std::size_t>(i)]) /
                                                target[static_cast<std::size_t>(i)]);
  for (Eigen::Index i = k + 1; i < got.size(); ++i) fit.tail = std::max(fit.tail, got[i]);
  return fit;
}

void validate(const DGPSpec& spec, const SpectralDesign& sd) {
  const std::size_t p = spec.x_support.size(), q = spec.z_support.size();
  const std::size_t k = sd.singular_values.size();
  if (p < 1 || q < 1) throw InvalidArgument("spectral design needs nonempty supports");
  if (k + 1 > std::min(p, q))
    throw InvalidArgument("spectral design lists " + std::to_string(k) +
                          " non-trivial singular values; at most min(|X|,|Z|) - 1 = " +
                          std::to_string(std::min(p, q) - 1) + " fit");
  for (std::size_t i = 0; i < k; ++i) {
    const double s = sd.singular_values[i];
    if (!(s > 0.0 && s <= 1.0)) throw InvalidArgument("singular values must lie in (0, 1]");
    if (i > 0 && s > sd.singular_values[i - 1]) throw InvalidArgument("singular values must be non-increasing");
  }
  if (!(sd.coef_decay_beta > 0.0)) throw InvalidArgument("coef_decay_beta must be positive");
  if (sd.r_perp_mass < 0.0 || sd.a_perp_mass < 0.0 || sd.noise_sd < 0.0)
    throw InvalidArgument("perp masses and noise_sd must be nonnegative");
  if (sd.r_perp_mass > 0.0 && q <= k + 1)
    throw InvalidArgument("r_perp_mass > 0 needs |Z| greater than the operator rank " + std::to_string(k + 1));
  if (sd.a_perp_mass > 0.0 && p <= k + 1)
    throw InvalidArgument("a_perp_mass > 0 needs |X| greater than the operator rank " + std::to_string(k + 1));
}

/// Probability table with the requested whitened spectrum, or InfeasibleDesign.
std::pair<Eigen::MatrixXd, int> match_spectrum(int p, int q, const std::vector<double>& target) {
  const auto k = static_cast<Eigen::Index>(target.size());
  Eigen::MatrixXd s_target = Eigen::MatrixXd::Zero(q, p);
  s_target(0, 0) = 1.0;
  for (Eigen::Index i = 0; i < k; ++i) s_target(i + 1, i + 1) = target[static_cast<std::size_t>(i)];

  const Eigen::MatrixXd start = cosine_basis(q) * s_target * cosine_basis(p).transpose();
  Eigen::MatrixXd prob = start.transpose() / std::sqrt(static_cast<double>(p) * q);
  prob = prob.cwiseMax(0.0);
  prob /= prob.sum();

  SpectrumFit fit;
  for (int it = 0; it <= kMaxIterations; ++it) {
    const Eigen::VectorXd px = prob.rowwise().sum();
    const Eigen::VectorXd pz = prob.colwise().sum().transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(whitened_of(prob), Eigen::ComputeFullU | Eigen::ComputeFullV);
    fit = compare(svd.singularValues(), target);
    if (fit.rel_error <= kSpectrumTol && fit.tail <= kTailTol && px.minCoeff() > 0.0 && pz.minCoeff() > 0.0)
      return {prob, it};
    if (it == kMaxIterations) break;
    const Eigen::MatrixXd a_target = svd.matrixU() * s_target * svd.matrixV().transpose();
    const Eigen::MatrixXd p_target =
        px.cwiseSqrt().asDiagonal() * a_target.transpose() * pz.cwiseSqrt().asDiagonal();
    prob = ((1.0 - kStep) * prob + kStep * p_target).cwiseMax(0.0);
    prob /= prob.sum();
  }
  std::ostringstream os;
  os << "spectrum not realizable as a probability table after " << kMaxIterations
     << " iterations: max relative singular-value error " << fit.rel_error << ", residual tail " << fit.tail
     << "; target (";
  for (std::size_t i = 0; i < target.size(); ++i) os << (i ? ", " : "") << target[i];
  os << ") achieved (";
  for (Eigen::Index i = 1; i <= k && i < fit.values.size(); ++i) os << (i > 1 ? ", " : "") << fit.values[i];
  os << ")";
  throw InfeasibleDesign(os.str());
}

/// Flip the sign so that the entry of largest magnitude is positive.
double canonical_sign(const Eigen::VectorXd& v) {
  Eigen::Index idx = 0;
  v.cwiseAbs().maxCoeff(&idx);
  return v[idx] < 0.0 ? -1.0 : 1.0;
}

RealizedDGP realize_spectral(const DGPSpec& spec, const SpectralDesign& sd) {
  validate(spec, sd);
  const int p = static_cast<int>(spec.x_support.size());
  const int q = static_cast<int>(spec.z_support.size());
  auto [prob, iterations] = match_spectrum(p, q, sd.singular_values);

  const Eigen::MatrixXd zeros = Eigen::MatrixXd::Zero(p, q);
  const JointPMF bare(spec.x_support, spec.z_support, prob, zeros, zeros);
  if (bare.nx() != p || bare.nz() != q) throw InfeasibleDesign("realized table lost a support atom");
  const BasisSpec hs = BasisSpec::indicator(Domain::X, spec.x_support);
  const BasisSpec gs = BasisSpec::indicator(Domain::Z, spec.z_support);
  const OperatorMatrix op = build_operator(bare, hs, gs);
  const int rank = op.rank();
  if (rank != static_cast<int>(sd.singular_values.size()) + 1)
    throw InfeasibleDesign("realized operator has rank " + std::to_string(rank) + ", expected " +
                           std::to_string(sd.singular_values.size() + 1));

  Eigen::MatrixXd u = op.left_singular();
  Eigen::MatrixXd v = op.right_singular();
  const Eigen::VectorXd& s = op.singular_values();
  for (int i = 0; i < rank; ++i) {
    const double sign = canonical_sign(u.col(i));
    u.col(i) *= sign;
    v.col(i) *= sign;
  }
  for (Eigen::Index j = rank; j < u.cols(); ++j) u.col(j) *= canonical_sign(u.col(j));
  for (Eigen::Index j = rank; j < v.cols(); ++j) v.col(j) *= canonical_sign(v.col(j));

  const double beta = sd.coef_decay_beta;
  Eigen::VectorXd r_par = Eigen::VectorXd::Zero(q);
  Eigen::VectorXd a_par = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd h_dag = Eigen::VectorXd::Zero(p);
  for (int i = 0; i < rank; ++i) {
    const double c = std::pow(s[i], beta + 1.0);
    r_par += c * u.col(i);
    a_par += c * v.col(i);
    h_dag += std::pow(s[i], beta) * v.col(i);
  }
  Eigen::VectorXd r_perp = Eigen::VectorXd::Zero(q);
  Eigen::VectorXd a_perp = Eigen::VectorXd::Zero(p);
  if (sd.r_perp_mass > 0.0) r_perp = sd.r_perp_mass * u.col(rank);
  if (sd.a_perp_mass > 0.0) a_perp = sd.a_perp_mass * v.col(rank);

  const Eigen::VectorXd h_fn = op.unwhiten_h(h_dag);
  const Eigen::VectorXd r_perp_fn = op.unwhiten_g(r_perp);
  const Eigen::VectorXd a_fn = op.unwhiten_h(a_par + a_perp);

  Eigen::MatrixXd y_values(p, q);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < q; ++j) y_values(i, j) = h_fn[i] + r_perp_fn[j];
  const Eigen::MatrixXd y_var = Eigen::MatrixXd::Constant(p, q, sd.noise_sd * sd.noise_sd);

  FunctionalPair fp;
  fp.mtilde = IVOutcome{};
  fp.m = WeightedX{WeightFunction::table(spec.x_support, std::vector<double>(a_fn.data(), a_fn.data() + p))};

  DGPMetadata meta;
  meta.name = spec.name;
  meta.seed_domain = spec.seed_domain;
  meta.beta = beta;
  meta.r_perp_mass = sd.r_perp_mass;
  meta.a_perp_mass = sd.a_perp_mass;
  meta.rank = rank;
  meta.iterations = iterations;
  meta.target_singular_values = sd.singular_values;
  for (int i = 1; i < rank; ++i) meta.achieved_singular_values.push_back(s[i]);

  return RealizedDGP{JointPMF(spec.x_support, spec.z_support, prob, y_values, y_var), fp, meta};
}

}  // namespace

RealizedDGP realize(const DGPSpec& spec) {
  if (const auto* sd = std::get_if<SpectralDesign>(&spec.construction)) return realize_spectral(spec, *sd);
  const auto& ex = std::get<ExplicitPMF>(spec.construction);
  JointPMF pmf(spec.x_support, spec.z_support, ex.prob, ex.y_values, ex.y_cond_var);
  DGPMetadata meta;
  meta.name = spec.name;
  meta.seed_domain = spec.seed_domain;
  return RealizedDGP{std::move(pmf), spec.functionals.value_or(FunctionalPair{}), meta};
}

std::vector<Sample> sample(const JointPMF& pmf, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw InvalidArgument("sample: n must be at least 1");
  const int nx = pmf.nx(), nz = pmf.nz();
  std::vector<double> cdf;
  cdf.reserve(static_cast<std::size_t>(nx * nz));
  double acc = 0.0;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < nz; ++j) cdf.push_back(acc += pmf.prob()(i, j));

  auto eng = make_engine({seed, 0xda7aULL});
  std::vector<Sample> out;
  out.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double u = uniform01(eng) * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    auto cell = static_cast<int>(std::min<std::ptrdiff_t>(it - cdf.begin(), nx * nz - 1));
    // Skip zero-probability cells that share a cumulative value with their successor.
    while (pmf.prob()(cell / nz, cell % nz) <= 0.0 && cell + 1 < nx * nz) ++cell;
    const int i = cell / nz, j = cell % nz;
    double y = pmf.y_values()(i, j);
    const double var = pmf.y_cond_var()(i, j);
    if (var > 0.0) y += std::sqrt(var) * standard_normal(eng);
    out.push_back({pmf.x_support()[static_cast<std::size_t>(i)], y, pmf.z_support()[static_cast<std::size_t>(j)]});
  }
  return out;
}

void write_pmf_csv(std::ostream& os, const JointPMF& pmf) {
  const auto prec = os.precision();
  os << std::setprecision(17) << "x,z,prob,y_mean,y_var\n";
  for (int i = 0; i < pmf.nx(); ++i)
    for (int j = 0; j < pmf.nz(); ++j)
      os << pmf.x_support()[static_cast<std::size_t>(i)] << ',' << pmf.z_support()[static_cast<std::size_t>(j)]
         << ',' << pmf.prob()(i, j) << ',' << pmf.y_values()(i, j) << ',' << pmf.y_cond_var()(i, j) << '\n';
  os.precision(prec);
}

}  // namespace lsdml
