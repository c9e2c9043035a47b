#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <span>
#include <vector>

#include "lsdml/function_space.hpp"
#include "lsdml/functionals.hpp"
#include "lsdml/joint_pmf.hpp"
#include "lsdml/score.hpp"

namespace lsdml {

/// Population operator T_P: H -> G in basis coordinates, together with its
/// Gram-adjusted adjoint and the SVD of the Gram-whitened matrix.
///
/// With G_H = L_H L_H^T and G_G = L_G L_G^T, whitened coordinates are u = L_H^T theta
/// (resp. L_G^T gamma) and the whitened operator is L_G^{-1} C L_H^{-T}, where
/// C_{ij} = E[psi_i(Z) phi_j(X)].
class OperatorMatrix {
 public:
  OperatorMatrix(BasisSpec hspace, BasisSpec gspace, Eigen::MatrixXd cross, GramMatrix gram_h,
                 GramMatrix gram_g);

  const BasisSpec& hspace() const { return gram_h_.space; }
  const BasisSpec& gspace() const { return gram_g_.space; }
  const Eigen::MatrixXd& matrix() const { return t_; }          // dim G x dim H
  const Eigen::MatrixXd& adjoint() const { return t_adj_; }     // dim H x dim G
  const Eigen::MatrixXd& cross_moments() const { return cross_; }
  const GramMatrix& gram_h() const { return gram_h_; }
  const GramMatrix& gram_g() const { return gram_g_; }

  const Eigen::MatrixXd& whitened() const { return whitened_; }
  const Eigen::MatrixXd& left_singular() const { return u_; }   // whitened G coordinates
  const Eigen::MatrixXd& right_singular() const { return v_; }  // whitened H coordinates
  const Eigen::VectorXd& singular_values() const { return s_; }
  int rank() const { return rank_; }

  CoefVector apply(const CoefVector& h) const;
  CoefVector apply_adjoint(const CoefVector& g) const;

  Eigen::VectorXd whiten_h(const Eigen::VectorXd& theta) const;
  Eigen::VectorXd unwhiten_h(const Eigen::VectorXd& u) const;
  Eigen::VectorXd whiten_g(const Eigen::VectorXd& gamma) const;
  Eigen::VectorXd unwhiten_g(const Eigen::VectorXd& u) const;

  /// Moore-Penrose pseudoinverse of the whitened operator (rank-truncated).
  Eigen::MatrixXd whitened_pinv() const;

 private:
  Eigen::MatrixXd cross_;
  GramMatrix gram_h_, gram_g_;
  Eigen::MatrixXd t_, t_adj_;
  Eigen::MatrixXd chol_h_, chol_g_;
  Eigen::MatrixXd whitened_;
  Eigen::MatrixXd u_, v_;
  Eigen::VectorXd s_;
  int rank_ = 0;
};

OperatorMatrix build_operator(const JointPMF& pmf, const BasisSpec& hspace, const BasisSpec& gspace);

struct OracleSolution {
  CoefVector h_dag, alpha_h_dag;  // over H
  CoefVector g_dag, alpha_g_dag;  // over G
  CoefVector r_P, r_parallel, r_perp, xi_h, xi_alpha_h;  // over G
  CoefVector a_P, a_parallel, a_perp, xi_g, xi_alpha_g;  // over H
  double psi = 0.0;
  std::vector<CoefVector> kernel_H;  // Gram-orthonormal basis of ker(T)
  std::vector<CoefVector> kernel_G;  // Gram-orthonormal basis of ker(T*)
  int rank = 0;
  Eigen::VectorXd singular_values;
  bool source_condition_violated = false;
  double alpha_h_residual = 0.0;  // ||T alpha_h - g_dag||
  double alpha_g_residual = 0.0;  // ||T* alpha_g - h_dag||

  /// The minimum-norm nuisance tuple (h, g, alpha_h, alpha_g, T h, T* g, T alpha_h,
  /// T* alpha_g, r_P, a_P).
  NuisanceTuple nuisances() const;
};

OracleSolution solve_oracle(const OperatorMatrix& op, const JointPMF& pmf, const FunctionalPair& fp);

enum class TikhonovSide { Primal, Dual, WeakRieszPrimal, WeakRieszDual };

/// argmin_f lambda ||f||^2 + ||K f - target||^2 for each lambda, with K = T for the
/// primal sides (target over G, result over H) and K = T* for the dual sides.
std::vector<CoefVector> tikhonov_path(const OperatorMatrix& op, const CoefVector& target,
                                      std::span<const double> lambdas, TikhonovSide side);

struct BiasReport {
  double lhs = 0.0;
  double termA = 0.0;
  double termB = 0.0;
  double termC = 0.0;
  double residual = 0.0;
};

/// Exact check of E_P[chi(W; eta)] - Psi(P) = A + B + C. The left side is summed over
/// the pmf cells; the terms come from the inner-product formulas around the anchor
/// (theta_P, alpha_P, r_P, a_P).
BiasReport bias_identity_check(const OperatorMatrix& op, const JointPMF& pmf, const FunctionalPair& fp,
                               const NuisanceTuple& eta, const OracleSolution& anchor);

/// Flat CSV (vector,index,point,value) of every named coefficient vector, plus psi.
void write_oracle_csv(std::ostream& os, const OracleSolution& sol);

}  // namespace lsdml
