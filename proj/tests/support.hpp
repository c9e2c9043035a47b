#pragma once

// Shared fixtures for the test binaries: small canonical laws and a reference
// oracle computed by a different route than the library (symmetric square roots
// of the Grams and a complete orthogonal decomposition instead of Cholesky + SVD).

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "lsdml/dgp.hpp"
#include "lsdml/function_space.hpp"
#include "lsdml/functionals.hpp"
#include "lsdml/joint_pmf.hpp"
#include "lsdml/oracle.hpp"

namespace fixtures {

using lsdml::BasisSpec;
using lsdml::CoefVector;
using lsdml::Domain;
using lsdml::JointPMF;

/// X = Z uniform on {0, 1}, Y = X.
inline JointPMF identity_pmf() {
  Eigen::MatrixXd p(2, 2), y(2, 2);
  p << 0.5, 0.0, 0.0, 0.5;
  y << 0.0, 0.0, 1.0, 1.0;
  return JointPMF({0.0, 1.0}, {0.0, 1.0}, p, y, Eigen::MatrixXd::Zero(2, 2));
}

/// X on {0,1,2}, Z on {0,1}, Y = X.
inline JointPMF three_by_two_pmf() {
  Eigen::MatrixXd p(3, 2), y(3, 2);
  p << 0.2, 0.1, 0.1, 0.2, 0.2, 0.2;
  y << 0.0, 0.0, 1.0, 1.0, 2.0, 2.0;
  return JointPMF({0.0, 1.0, 2.0}, {0.0, 1.0}, p, y, Eigen::MatrixXd::Constant(3, 2, 0.25));
}

/// X independent of Z, both on {0, 1}, P(X=1) = 0.3, P(Z=1) = 0.6, Y = X.
inline JointPMF independence_pmf() {
  Eigen::Vector2d px(0.7, 0.3), pz(0.4, 0.6);
  Eigen::MatrixXd p = px * pz.transpose();
  Eigen::MatrixXd y(2, 2);
  y << 0.0, 0.0, 1.0, 1.0;
  return JointPMF({0.0, 1.0}, {0.0, 1.0}, p, y, Eigen::MatrixXd::Zero(2, 2));
}

inline BasisSpec hsat(const JointPMF& p) { return BasisSpec::indicator(Domain::X, p.x_support()); }
inline BasisSpec gsat(const JointPMF& p) { return BasisSpec::indicator(Domain::Z, p.z_support()); }

inline std::vector<double> support(int n) {
  std::vector<double> s;
  for (int i = 0; i < n; ++i) s.push_back(i);
  return s;
}

inline lsdml::DGPSpec spectral(const char* name, int nx, int nz, std::vector<double> s, double beta,
                               double r_perp, double a_perp, double noise) {
  lsdml::DGPSpec d;
  d.name = name;
  d.x_support = support(nx);
  d.z_support = support(nz);
  d.construction = lsdml::SpectralDesign{std::move(s), beta, r_perp, a_perp, noise};
  return d;
}

/// Exact primal and dual solutions, 3x3 supports.
inline lsdml::DGPSpec exact_solution_spec() { return spectral("exact", 3, 3, {0.7, 0.4}, 1.0, 0.0, 0.0, 1.0); }
/// r has mass 0.5 in ker T*, so T h = r has no exact solution.
inline lsdml::DGPSpec no_solution_spec() { return spectral("no-solution", 3, 4, {0.7, 0.4}, 1.0, 0.5, 0.0, 1.0); }
/// a has mass 0.5 in ker T, so h is not identified.
inline lsdml::DGPSpec weak_id_spec() { return spectral("weak-id", 4, 3, {0.7, 0.4}, 1.0, 0.0, 0.5, 1.0); }

/// 32 x 32 design whose 31 non-trivial singular values are the subset products of
/// (0.95, 0.9, 0.8, 1e-2, 1e-4); spreads log-singular values over many decades.
inline lsdml::DGPSpec rate_spec(double beta) {
  const double rho[] = {0.95, 0.9, 0.8, 1e-2, 1e-4};
  std::vector<double> s;
  for (int mask = 1; mask < 32; ++mask) {
    double v = 1.0;
    for (int b = 0; b < 5; ++b)
      if (mask & (1 << b)) v *= rho[b];
    s.push_back(v);
  }
  std::sort(s.rbegin(), s.rend());
  return spectral("rates", 32, 32, s, beta, 0.0, 0.0, 0.0);
}

/// Symmetric inverse square root of an SPD matrix.
inline Eigen::MatrixXd inv_sqrt(const Eigen::MatrixXd& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  return es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
         es.eigenvectors().transpose();
}

inline Eigen::MatrixXd pinv(const Eigen::MatrixXd& a) {
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
  cod.setThreshold(1e-10);
  return cod.pseudoInverse();
}

/// Brute-force population quantities for saturated indicator bases.
struct Reference {
  Eigen::MatrixXd gh, gg, cross;  // Grams and C_{zx} = P(x, z)
  Eigen::VectorXd r, a, h_dag, g_dag, alpha_h, alpha_g;
  double psi = 0.0;
};

/// E[Y | Z] and the representer of h -> E[c(W) h(X)] by direct conditional
/// averaging, then minimum-norm solutions through symmetric whitening.
inline Reference reference_oracle(const JointPMF& pmf, const lsdml::FunctionalPair& fp) {
  const int nx = pmf.nx(), nz = pmf.nz();
  Reference ref;
  ref.gh = pmf.x_marginal().asDiagonal();
  ref.gg = pmf.z_marginal().asDiagonal();
  ref.cross = pmf.prob().transpose();
  ref.r = Eigen::VectorXd::Zero(nz);
  ref.a = Eigen::VectorXd::Zero(nx);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < nz; ++j) {
      const lsdml::Sample w{pmf.x_support()[i], pmf.y_values()(i, j), pmf.z_support()[j]};
      ref.r[j] += pmf.prob()(i, j) * fp.mtilde_multiplier(w);
      ref.a[i] += pmf.prob()(i, j) * fp.m_multiplier(w);
    }
  ref.r = ref.r.cwiseQuotient(pmf.z_marginal());
  ref.a = ref.a.cwiseQuotient(pmf.x_marginal());

  const Eigen::MatrixXd wh = inv_sqrt(ref.gh), wg = inv_sqrt(ref.gg);
  const Eigen::MatrixXd sh = ref.gh * wh, sg = ref.gg * wg;  // symmetric square roots
  const Eigen::MatrixXd a_w = wg * ref.cross * wh;
  const Eigen::MatrixXd a_pinv = pinv(a_w), at_pinv = pinv(a_w.transpose());
  const Eigen::VectorXd h_w = a_pinv * (sg * ref.r);
  const Eigen::VectorXd g_w = at_pinv * (sh * ref.a);
  ref.h_dag = wh * h_w;
  ref.g_dag = wg * g_w;
  ref.alpha_h = wh * (a_pinv * g_w);
  ref.alpha_g = wg * (at_pinv * h_w);
  ref.psi = g_w.dot(a_w * h_w);
  return ref;
}

inline double gram_norm(const Eigen::MatrixXd& g, const Eigen::VectorXd& v) { return std::sqrt(v.dot(g * v)); }

}  // namespace fixtures
