#include "lsdml/functionals.hpp"

#include <algorithm>
#include <cmath>

#include "lsdml/errors.hpp"
#include "lsdml/linalg.hpp"

namespace lsdml {

WeightFunction WeightFunction::polynomial(std::vector<double> coefficients) {
  if (coefficients.empty()) throw InvalidArgument("weight polynomial needs at least one coefficient");
  return WeightFunction(WeightPolynomial{std::move(coefficients)});
}

WeightFunction WeightFunction::table(std::vector<double> points, std::vector<double> values) {
  if (points.size() != values.size()) throw DimensionMismatch("weight table points/values length mismatch");
  for (std::size_t i = 1; i < points.size(); ++i)
    if (!(points[i - 1] < points[i])) throw InvalidArgument("weight table points must be strictly increasing");
  return WeightFunction(WeightTable{std::move(points), std::move(values)});
}

double WeightFunction::operator()(double t) const {
  if (const auto* tab = std::get_if<WeightTable>(&rep_)) {
    auto it = std::lower_bound(tab->points.begin(), tab->points.end(), t);
    if (it == tab->points.end() || *it != t)
      throw DomainError("weight table has no entry for point " + std::to_string(t));
    return tab->values[static_cast<std::size_t>(it - tab->points.begin())];
  }
  const auto& c = std::get<WeightPolynomial>(rep_).coefficients;
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * t + *it;
  return v;
}

double FunctionalPair::mtilde_multiplier(const Sample& w) const {
  if (std::holds_alternative<IVOutcome>(mtilde)) return w.y;
  return std::get<WeightedZ>(mtilde).weight(w.z);
}

double FunctionalPair::m_multiplier(const Sample& w) const {
  if (std::holds_alternative<AverageValue>(m)) return 1.0;
  return std::get<WeightedX>(m).weight(w.x);
}

std::string describe(const FunctionalPair& fp) {
  std::string s = std::holds_alternative<IVOutcome>(fp.mtilde) ? "iv_outcome" : "weighted_z";
  s += "/";
  s += std::holds_alternative<AverageValue>(fp.m) ? "average_value" : "weighted_x";
  return s;
}

double eval_mtilde(const FunctionalPair& fp, const Sample& w, const CoefVector& g) {
  if (g.space().domain() != Domain::Z) throw DimensionMismatch("eval_mtilde needs a Z-domain function");
  return fp.mtilde_multiplier(w) * g.space().features(w.z).dot(g.coefficients());
}

double eval_m(const FunctionalPair& fp, const Sample& w, const CoefVector& h) {
  if (h.space().domain() != Domain::X) throw DimensionMismatch("eval_m needs an X-domain function");
  return fp.m_multiplier(w) * h.space().features(w.x).dot(h.coefficients());
}

Eigen::VectorXd functional_moments(const FunctionalPair& fp, const Observations& obs,
                                   const BasisSpec& space) {
  const bool on_z = space.domain() == Domain::Z;
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(space.dimension());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const Sample w = obs.at(i);
    const double c = on_z ? fp.mtilde_multiplier(w) : fp.m_multiplier(w);
    mu += obs.weight()[i] * c * space.features(on_z ? w.z : w.x);
  }
  return mu;
}

CoefVector population_riesz(const FunctionalPair& fp, const JointPMF& pmf, const BasisSpec& space) {
  const GramMatrix g = gram(space, pmf);
  const Eigen::VectorXd mu = functional_moments(fp, Observations::population(pmf), space);
  const auto llt = factor_gram(g.matrix, "population_riesz");
  return CoefVector(space, llt.solve(mu));
}

}  // namespace lsdml
