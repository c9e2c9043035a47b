#include "lsdml/linalg.hpp"

#include <cmath>
#include <limits>

#include "lsdml/errors.hpp"

namespace lsdml {

double condition_number(const Eigen::MatrixXd& sym) {
  if (sym.size() == 0) return 1.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  const double hi = es.eigenvalues().cwiseAbs().maxCoeff();
  const double lo = es.eigenvalues().minCoeff();
  if (lo <= 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

Eigen::LLT<Eigen::MatrixXd> factor_gram(const Eigen::MatrixXd& gram, const std::string& what) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  if (gram.size() > 0) {
    const double top = es.eigenvalues().maxCoeff();
    const double low = es.eigenvalues().minCoeff();
    if (!(top > 0.0) || low <= kGramClampTol * top) {
      throw SingularSystem(what + ": Gram matrix is singular (a basis direction has zero probability); "
                                  "prune unsupported atoms or reduce the basis",
                           condition_number(gram));
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success)
    throw SingularSystem(what + ": Cholesky factorization failed", condition_number(gram));
  return llt;
}

Eigen::MatrixXd jittered(const Eigen::MatrixXd& gram) {
  const auto d = gram.rows();
  if (d == 0) return gram;
  const double eps = kEmpiricalJitter * gram.trace() / static_cast<double>(d);
  return gram + eps * Eigen::MatrixXd::Identity(d, d);
}

Eigen::LLT<Eigen::MatrixXd> factor_empirical_gram(const Eigen::MatrixXd& gram, const std::string& what) {
  const auto d = gram.rows();
  if (d >= 2) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
    const double top = es.eigenvalues().maxCoeff();
    int rank = 0;
    for (Eigen::Index i = 0; i < d; ++i)
      if (es.eigenvalues()[i] > kGramClampTol * top) ++rank;
    if (rank <= 1)
      throw SingularSystem(what + ": degenerate design, empirical Gram has numerical rank " +
                               std::to_string(rank) + " in dimension " + std::to_string(d),
                           condition_number(gram));
  }
  const Eigen::MatrixXd g = jittered(gram);
  Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (d > 0 && (llt.info() != Eigen::Success || !(g.trace() > 0.0)))
    throw SingularSystem(what + ": empirical Gram is singular after jitter", condition_number(g));
  return llt;
}

Eigen::VectorXd solve_spd(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const std::string& what) {
  if (a.rows() == 0) return Eigen::VectorXd(0);
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) {
    throw SingularSystem(what + ": system is not positive definite (condition " +
                             std::to_string(condition_number(a)) + ")",
                         condition_number(a));
  }
  Eigen::VectorXd x = llt.solve(b);
  if (!x.allFinite()) throw SingularSystem(what + ": solve produced non-finite values", condition_number(a));
  return x;
}

}  // namespace lsdml
