#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace lsdml {

/// One observation W = (X, Y, Z).
struct Sample {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// Exact finite-support joint law of (X, Y, Z). Matrices are indexed
/// (x_index, z_index); y_values holds E[Y | X, Z] and y_cond_var Var[Y | X, Z].
class JointPMF {
 public:
  /// Validates the table and removes support atoms whose marginal probability is zero.
  JointPMF(std::vector<double> x_support, std::vector<double> z_support,
           Eigen::MatrixXd prob, Eigen::MatrixXd y_values, Eigen::MatrixXd y_cond_var);

  const std::vector<double>& x_support() const { return x_support_; }
  const std::vector<double>& z_support() const { return z_support_; }
  const Eigen::MatrixXd& prob() const { return prob_; }
  const Eigen::MatrixXd& y_values() const { return y_values_; }
  const Eigen::MatrixXd& y_cond_var() const { return y_cond_var_; }

  int nx() const { return static_cast<int>(x_support_.size()); }
  int nz() const { return static_cast<int>(z_support_.size()); }
  Eigen::VectorXd x_marginal() const { return prob_.rowwise().sum(); }
  Eigen::VectorXd z_marginal() const { return prob_.colwise().sum().transpose(); }

 private:
  std::vector<double> x_support_;
  std::vector<double> z_support_;
  Eigen::MatrixXd prob_;
  Eigen::MatrixXd y_values_;
  Eigen::MatrixXd y_cond_var_;
};

/// Weighted observations with weights summing to one. Either an empirical sample
/// (weights 1/n) or the support cells of a JointPMF, where y is the conditional
/// mean. Every functional is linear in Y, so the pmf form gives exact population
/// moments through the same code path as a sample.
class Observations {
 public:
  Observations() = default;
  Observations(std::span<const Sample> sample);  // NOLINT: implicit by design of the API
  Observations(const std::vector<Sample>& sample)
      : Observations(std::span<const Sample>(sample)) {}
  static Observations population(const JointPMF& pmf);

  std::size_t size() const { return x_.size(); }
  bool empty() const { return x_.empty(); }
  bool is_population() const { return population_; }
  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& y() const { return y_; }
  const std::vector<double>& z() const { return z_; }
  const std::vector<double>& weight() const { return w_; }
  Sample at(std::size_t i) const { return {x_[i], y_[i], z_[i]}; }

 private:
  std::vector<double> x_, y_, z_, w_;
  bool population_ = false;
};

}  // namespace lsdml
