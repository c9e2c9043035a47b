#pragma once

#include "lsdml/function_space.hpp"
#include "lsdml/functionals.hpp"
#include "lsdml/joint_pmf.hpp"

namespace lsdml {

/// Solution of a penalized min-max problem over linear sieves.
struct MinimaxFit {
  CoefVector coef;
  double lambda = 0.0;
  double saddle_value = 0.0;
  CoefVector critic_coef;
};

/// h-hat(lambda) = argmin_{h in H} max_{g in G} E_n[2(m~(W;g) - h(X)g(Z)) - g(Z)^2 + lambda h(X)^2].
///
/// The inner maximum is attained at gamma = G_G^{-1}(mu - C theta); substituting
/// gives (C^T G_G^{-1} C + lambda G_H) theta = C^T G_G^{-1} mu with
/// mu_j = E_n[m~(W; psi_j)] and C the empirical cross-moment matrix.
MinimaxFit minimax_primary(const Observations& data, const BasisSpec& hspace, const BasisSpec& gspace,
                           const FunctionalPair& fp, double lambda);

/// g-hat(lambda): the same problem with H and G exchanged and m~ replaced by m.
MinimaxFit minimax_dual(const Observations& data, const BasisSpec& hspace, const BasisSpec& gspace,
                        const FunctionalPair& fp, double lambda);

/// alpha^h-hat(g1, lambda): the primal problem with m~(W; g) replaced by g1(Z) g(Z).
MinimaxFit minimax_weak_riesz(const Observations& data, const BasisSpec& hspace, const BasisSpec& gspace,
                              const CoefVector& g1, double lambda);

/// alpha^g-hat(h1, lambda): the dual problem with m(W; h) replaced by h1(X) h(X).
MinimaxFit minimax_weak_riesz_dual(const Observations& data, const BasisSpec& hspace,
                                   const BasisSpec& gspace, const CoefVector& h1, double lambda);

/// Least squares of input(X) on the target Z-basis (or input(Z) on an X-basis).
CoefVector projection_ls(const Observations& data, const CoefVector& input, const BasisSpec& target_space);

enum class RieszTarget { RHat, AHat };

/// argmin_{f} E_n[f^2/2 - m~(W; f)] over a Z-basis (RHat) or the m-analogue over an
/// X-basis (AHat); closed form Gram * c = moment vector.
CoefVector riesz_regression(const Observations& data, const BasisSpec& space, const FunctionalPair& fp,
                            RieszTarget which);

/// Default Tikhonov level n^{-1/min(beta+1, 2)}.
double default_lambda(std::size_t n, double beta);

}  // namespace lsdml
