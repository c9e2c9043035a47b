#include "lsdml/joint_pmf.hpp"

#include <cmath>

#include "lsdml/errors.hpp"

namespace lsdml {

namespace {

void check_sorted(const std::vector<double>& v, const char* name) {
  if (v.empty()) throw InvalidArgument(std::string(name) + " support is empty");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) throw InvalidArgument(std::string(name) + " support has a non-finite point");
    if (i > 0 && !(v[i - 1] < v[i]))
      throw InvalidArgument(std::string(name) + " support must be strictly increasing");
  }
}

}  // namespace

JointPMF::JointPMF(std::vector<double> x_support, std::vector<double> z_support,
                   Eigen::MatrixXd prob, Eigen::MatrixXd y_values, Eigen::MatrixXd y_cond_var) {
  check_sorted(x_support, "X");
  check_sorted(z_support, "Z");
  const auto nx = static_cast<Eigen::Index>(x_support.size());
  const auto nz = static_cast<Eigen::Index>(z_support.size());
  auto shape_ok = [&](const Eigen::MatrixXd& m) { return m.rows() == nx && m.cols() == nz; };
  if (!shape_ok(prob) || !shape_ok(y_values) || !shape_ok(y_cond_var))
    throw DimensionMismatch("JointPMF tables must be |X| x |Z| = " + std::to_string(nx) + " x " +
                            std::to_string(nz));
  if (!prob.allFinite() || !y_values.allFinite() || !y_cond_var.allFinite())
    throw InvalidArgument("JointPMF tables must be finite");
  if (prob.minCoeff() < 0.0) throw InvalidArgument("JointPMF probabilities must be nonnegative");
  if (y_cond_var.minCoeff() < 0.0) throw InvalidArgument("JointPMF conditional variances must be nonnegative");
  if (std::abs(prob.sum() - 1.0) > 1e-12)
    throw InvalidArgument("JointPMF probabilities must sum to 1 (got " + std::to_string(prob.sum()) + ")");

  const Eigen::VectorXd px = prob.rowwise().sum();
  const Eigen::VectorXd pz = prob.colwise().sum().transpose();
  std::vector<Eigen::Index> keep_x, keep_z;
  for (Eigen::Index i = 0; i < nx; ++i)
    if (px[i] > 0.0) keep_x.push_back(i);
  for (Eigen::Index j = 0; j < nz; ++j)
    if (pz[j] > 0.0) keep_z.push_back(j);

  const auto kx = static_cast<Eigen::Index>(keep_x.size());
  const auto kz = static_cast<Eigen::Index>(keep_z.size());
  prob_.resize(kx, kz);
  y_values_.resize(kx, kz);
  y_cond_var_.resize(kx, kz);
  for (Eigen::Index a = 0; a < kx; ++a) {
    x_support_.push_back(x_support[keep_x[a]]);
    for (Eigen::Index b = 0; b < kz; ++b) {
      prob_(a, b) = prob(keep_x[a], keep_z[b]);
      y_values_(a, b) = y_values(keep_x[a], keep_z[b]);
      y_cond_var_(a, b) = y_cond_var(keep_x[a], keep_z[b]);
    }
  }
  for (auto b : keep_z) z_support_.push_back(z_support[b]);
}

Observations::Observations(std::span<const Sample> sample) {
  const std::size_t n = sample.size();
  x_.reserve(n);
  y_.reserve(n);
  z_.reserve(n);
  for (const auto& s : sample) {
    if (!std::isfinite(s.x) || !std::isfinite(s.y) || !std::isfinite(s.z))
      throw InvalidArgument("sample contains a non-finite value");
    x_.push_back(s.x);
    y_.push_back(s.y);
    z_.push_back(s.z);
  }
  w_.assign(n, n == 0 ? 0.0 : 1.0 / static_cast<double>(n));
}

Observations Observations::population(const JointPMF& pmf) {
  Observations obs;
  obs.population_ = true;
  for (int i = 0; i < pmf.nx(); ++i) {
    for (int j = 0; j < pmf.nz(); ++j) {
      if (pmf.prob()(i, j) <= 0.0) continue;
      obs.x_.push_back(pmf.x_support()[i]);
      obs.y_.push_back(pmf.y_values()(i, j));
      obs.z_.push_back(pmf.z_support()[j]);
      obs.w_.push_back(pmf.prob()(i, j));
    }
  }
  return obs;
}

}  // namespace lsdml
