#include "lsdml/score.hpp"

#include "lsdml/errors.hpp"

namespace lsdml {

void NuisanceTuple::validate() const {
  const BasisSpec& hs = h.space();
  const BasisSpec& gs = g.space();
  if (hs.domain() != Domain::X) throw DimensionMismatch("nuisance h must be over the X-domain");
  if (gs.domain() != Domain::Z) throw DimensionMismatch("nuisance g must be over the Z-domain");
  for (const CoefVector* c : {&alpha_h, &xi_g, &xi_alpha_g, &a})
    if (!(c->space() == hs)) throw DimensionMismatch("H-side nuisance is not over the same basis as h");
  for (const CoefVector* c : {&alpha_g, &xi_h, &xi_alpha_h, &r})
    if (!(c->space() == gs)) throw DimensionMismatch("G-side nuisance is not over the same basis as g");
}

NuisanceTuple NuisanceTuple::zero(const BasisSpec& hspace, const BasisSpec& gspace) {
  const auto zh = CoefVector::zero(hspace);
  const auto zg = CoefVector::zero(gspace);
  return {zh, zg, zh, zg, zg, zh, zg, zh, zg, zh};
}

double score(const Sample& w, const NuisanceTuple& eta, const FunctionalPair& fp) {
  const Eigen::VectorXd phi = eta.h.space().features(w.x);
  const Eigen::VectorXd psi = eta.g.space().features(w.z);
  auto at_x = [&](const CoefVector& c) { return phi.dot(c.coefficients()); };
  auto at_z = [&](const CoefVector& c) { return psi.dot(c.coefficients()); };

  const double h = at_x(eta.h), g = at_z(eta.g);
  const double ah = at_x(eta.alpha_h), ag = at_z(eta.alpha_g);
  const double xh = at_z(eta.xi_h), xg = at_x(eta.xi_g);
  const double xah = at_z(eta.xi_alpha_h), xag = at_x(eta.xi_alpha_g);
  const double r = at_z(eta.r), a = at_x(eta.a);

  const double primary = -h * xah + fp.mtilde_multiplier(w) * xah - (ah - xah) * (xh - r);
  const double dual = -g * xag + fp.m_multiplier(w) * xag - (ag - xag) * (xg - a);
  return primary + dual + g * h;
}

double score_mean(const Observations& obs, const NuisanceTuple& eta, const FunctionalPair& fp) {
  eta.validate();
  double total = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) total += obs.weight()[i] * score(obs.at(i), eta, fp);
  return total;
}

}  // namespace lsdml
