#pragma once

#include "lsdml/function_space.hpp"
#include "lsdml/functionals.hpp"
#include "lsdml/joint_pmf.hpp"

namespace lsdml {

/// The ten nuisances entering the debiased score. Members over the X-domain space H:
/// h, alpha_h, xi_g, xi_alpha_g, a. Members over the Z-domain space G: g, alpha_g,
/// xi_h, xi_alpha_h, r.
struct NuisanceTuple {
  CoefVector h;
  CoefVector g;
  CoefVector alpha_h;
  CoefVector alpha_g;
  CoefVector xi_h;
  CoefVector xi_g;
  CoefVector xi_alpha_h;
  CoefVector xi_alpha_g;
  CoefVector r;
  CoefVector a;

  /// Throws DimensionMismatch unless every member lives on the expected domain
  /// and the H-members (resp. G-members) share one basis.
  void validate() const;

  static NuisanceTuple zero(const BasisSpec& hspace, const BasisSpec& gspace);
};

/// chi(w; eta):
///   - h(x) xi_ah(z) + m~(w; xi_ah) - (alpha_h(x) - xi_ah(z)) (xi_h(z) - r(z))
///   - g(z) xi_ag(x) + m(w; xi_ag)  - (alpha_g(z) - xi_ag(x)) (xi_g(x) - a(x))
///   + g(z) h(x)
/// alpha_g is a function of z and xi_alpha_g a function of x.
double score(const Sample& w, const NuisanceTuple& eta, const FunctionalPair& fp);

/// Weighted mean of the score. With Observations::population this is the exact
/// expectation under the pmf.
double score_mean(const Observations& obs, const NuisanceTuple& eta, const FunctionalPair& fp);

}  // namespace lsdml
