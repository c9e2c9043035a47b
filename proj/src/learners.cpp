#include "lsdml/learners.hpp"

#include <algorithm>
#include <cmath>

#include "lsdml/errors.hpp"
#include "lsdml/linalg.hpp"

namespace lsdml {

namespace {

struct EmpiricalMoments {
  Eigen::MatrixXd dx;     // n x dim H
  Eigen::MatrixXd dz;     // n x dim G
  Eigen::VectorXd w;
  Eigen::MatrixXd gram_h;
  Eigen::MatrixXd gram_g;
  Eigen::MatrixXd cross;  // dim G x dim H
};

Eigen::VectorXd weights(const Observations& data) {
  return Eigen::Map<const Eigen::VectorXd>(data.weight().data(), static_cast<Eigen::Index>(data.size()));
}

EmpiricalMoments moments(const Observations& data, const BasisSpec& hspace, const BasisSpec& gspace) {
  if (data.empty()) throw InvalidArgument("learner called with no observations");
  EmpiricalMoments m;
  m.dx = design_matrix(hspace, data.x());
  m.dz = design_matrix(gspace, data.z());
  m.w = weights(data);
  m.gram_h = m.dx.transpose() * m.w.asDiagonal() * m.dx;
  m.gram_g = m.dz.transpose() * m.w.asDiagonal() * m.dz;
  m.cross = m.dz.transpose() * m.w.asDiagonal() * m.dx;
  return m;
}

void check_spaces(const BasisSpec& hspace, const BasisSpec& gspace) {
  if (hspace.domain() != Domain::X) throw DimensionMismatch("hspace must be over the X-domain");
  if (gspace.domain() != Domain::Z) throw DimensionMismatch("gspace must be over the Z-domain");
}

void check_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidArgument("lambda must be positive and finite");
}

/// argmin_theta max_gamma 2(gamma'mu - theta' K' gamma) - gamma' Q gamma + lambda theta' P theta
/// with P the primal Gram, Q the critic Gram and K = cross (critic x primal).
MinimaxFit solve_minimax(const BasisSpec& primal, const BasisSpec& critic, const Eigen::MatrixXd& gram_p,
                         const Eigen::MatrixXd& gram_q, const Eigen::MatrixXd& cross,
                         const Eigen::VectorXd& mu, double lambda, const char* what) {
  check_lambda(lambda);
  if (critic.dimension() == 0) {
    // With no critic the objective is lambda ||h||^2, minimized at zero.
    return {CoefVector::zero(primal), lambda, 0.0, CoefVector::zero(critic)};
  }
  const std::string tag(what);
  const auto q = factor_empirical_gram(gram_q, tag + " (critic Gram)");
  // Only the degeneracy check is needed here; the primal Gram enters M jittered.
  (void)factor_empirical_gram(gram_p, tag + " (hypothesis Gram)");
  const Eigen::MatrixXd qinv_k = q.solve(cross);
  const Eigen::VectorXd qinv_mu = q.solve(mu);
  Eigen::MatrixXd system = cross.transpose() * qinv_k + lambda * jittered(gram_p);
  system = 0.5 * (system + system.transpose());
  const Eigen::VectorXd theta = solve_spd(system, cross.transpose() * qinv_mu, tag);
  const Eigen::VectorXd gamma = qinv_mu - qinv_k * theta;
  const double value = 2.0 * (gamma.dot(mu) - theta.dot(cross.transpose() * gamma)) -
                       gamma.dot(gram_q * gamma) + lambda * theta.dot(gram_p * theta);
  return {CoefVector(primal, theta), lambda, value, CoefVector(critic, gamma)};
}

Eigen::VectorXd weighted_product_moments(const Eigen::MatrixXd& design, const Eigen::VectorXd& w,
                                         const Eigen::VectorXd& values) {
  return design.transpose() * (w.cwiseProduct(values));
}

}  // namespace

MinimaxFit minimax_primary(const Observations& data, const BasisSpec& hspace, const BasisSpec& gspace,
                           const FunctionalPair& fp, double lambda) {
  check_spaces(hspace, gspace);
  const auto m = moments(data, hspace, gspace);
  const Eigen::VectorXd mu = functional_moments(fp, data, gspace);
  return solve_minimax(hspace, gspace, m.gram_h, m.gram_g, m.cross, mu, lambda, "minimax_primary");
}

MinimaxFit minimax_dual(const Observations& data, const BasisSpec& hspace, const BasisSpec& gspace,
                        const FunctionalPair& fp, double lambda) {
  check_spaces(hspace, gspace);
  const auto m = moments(data, hspace, gspace);
  const Eigen::VectorXd mu = functional_moments(fp, data, hspace);
  return solve_minimax(gspace, hspace, m.gram_g, m.gram_h, m.cross.transpose(), mu, lambda, "minimax_dual");
}

MinimaxFit minimax_weak_riesz(const Observations& data, const BasisSpec& hspace, const BasisSpec& gspace,
                              const CoefVector& g1, double lambda) {
  check_spaces(hspace, gspace);
  if (g1.space().domain() != Domain::Z) throw DimensionMismatch("minimax_weak_riesz: g1 must be over Z");
  const auto m = moments(data, hspace, gspace);
  const Eigen::VectorXd g1_vals = design_matrix(g1.space(), data.z()) * g1.coefficients();
  const Eigen::VectorXd mu = weighted_product_moments(m.dz, m.w, g1_vals);
  return solve_minimax(hspace, gspace, m.gram_h, m.gram_g, m.cross, mu, lambda, "minimax_weak_riesz");
}

MinimaxFit minimax_weak_riesz_dual(const Observations& data, const BasisSpec& hspace,
                                   const BasisSpec& gspace, const CoefVector& h1, double lambda) {
  check_spaces(hspace, gspace);
  if (h1.space().domain() != Domain::X) throw DimensionMismatch("minimax_weak_riesz_dual: h1 must be over X");
  const auto m = moments(data, hspace, gspace);
  const Eigen::VectorXd h1_vals = design_matrix(h1.space(), data.x()) * h1.coefficients();
  const Eigen::VectorXd mu = weighted_product_moments(m.dx, m.w, h1_vals);
  return solve_minimax(gspace, hspace, m.gram_g, m.gram_h, m.cross.transpose(), mu, lambda,
                       "minimax_weak_riesz_dual");
}

CoefVector projection_ls(const Observations& data, const CoefVector& input, const BasisSpec& target_space) {
  if (data.empty()) throw InvalidArgument("projection_ls: no observations");
  if (input.space().domain() == target_space.domain())
    throw DimensionMismatch("projection_ls: target space must be over the other coordinate");
  const bool input_on_x = input.space().domain() == Domain::X;
  const auto& in_pts = input_on_x ? data.x() : data.z();
  const auto& out_pts = input_on_x ? data.z() : data.x();
  const Eigen::VectorXd vals = design_matrix(input.space(), in_pts) * input.coefficients();
  const Eigen::MatrixXd d = design_matrix(target_space, out_pts);
  const Eigen::VectorXd w = weights(data);
  const Eigen::MatrixXd g = d.transpose() * w.asDiagonal() * d;
  if (target_space.dimension() == 0) return CoefVector::zero(target_space);
  const auto llt = factor_empirical_gram(g, "projection_ls");
  return CoefVector(target_space, llt.solve(weighted_product_moments(d, w, vals)));
}

CoefVector riesz_regression(const Observations& data, const BasisSpec& space, const FunctionalPair& fp,
                            RieszTarget which) {
  if (data.empty()) throw InvalidArgument("riesz_regression: no observations");
  const Domain expected = which == RieszTarget::RHat ? Domain::Z : Domain::X;
  if (space.domain() != expected)
    throw DimensionMismatch(which == RieszTarget::RHat ? "riesz_regression: r-hat needs a Z-basis"
                                                       : "riesz_regression: a-hat needs an X-basis");
  if (space.dimension() == 0) return CoefVector::zero(space);
  const Eigen::MatrixXd d = design_matrix(space, expected == Domain::Z ? data.z() : data.x());
  const Eigen::VectorXd w = weights(data);
  const Eigen::MatrixXd g = d.transpose() * w.asDiagonal() * d;
  const auto llt = factor_empirical_gram(g, "riesz_regression");
  return CoefVector(space, llt.solve(functional_moments(fp, data, space)));
}

double default_lambda(std::size_t n, double beta) {
  if (n == 0) throw InvalidArgument("default_lambda: n must be positive");
  if (!(beta > 0.0)) throw InvalidArgument("default_lambda: beta must be positive");
  return std::pow(static_cast<double>(n), -1.0 / std::min(beta + 1.0, 2.0));
}

}  // namespace lsdml
