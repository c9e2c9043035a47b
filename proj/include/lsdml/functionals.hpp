#pragma once

#include <string>
#include <variant>
#include <vector>

#include "lsdml/function_space.hpp"
#include "lsdml/joint_pmf.hpp"

namespace lsdml {

/// Known weight function on one coordinate: a lookup table on finitely many
/// points or a polynomial c_0 + c_1 t + ...
struct WeightTable {
  std::vector<double> points;  // strictly increasing
  std::vector<double> values;
  bool operator==(const WeightTable&) const = default;
};
struct WeightPolynomial {
  std::vector<double> coefficients;
  bool operator==(const WeightPolynomial&) const = default;
};

class WeightFunction {
 public:
  WeightFunction() : rep_(WeightPolynomial{{1.0}}) {}
  static WeightFunction constant(double c) { return WeightFunction(WeightPolynomial{{c}}); }
  static WeightFunction polynomial(std::vector<double> coefficients);
  static WeightFunction table(std::vector<double> points, std::vector<double> values);

  double operator()(double t) const;
  const std::variant<WeightTable, WeightPolynomial>& rep() const { return rep_; }
  bool operator==(const WeightFunction&) const = default;

 private:
  explicit WeightFunction(std::variant<WeightTable, WeightPolynomial> rep) : rep_(std::move(rep)) {}
  std::variant<WeightTable, WeightPolynomial> rep_;
};

/// m~(w; g) = y g(z).
struct IVOutcome {
  bool operator==(const IVOutcome&) const = default;
};
/// m~(w; g) = omega(z) g(z).
struct WeightedZ {
  WeightFunction weight;
  bool operator==(const WeightedZ&) const = default;
};
/// m(w; h) = h(x).
struct AverageValue {
  bool operator==(const AverageValue&) const = default;
};
/// m(w; h) = omega(x) h(x).
struct WeightedX {
  WeightFunction weight;
  bool operator==(const WeightedX&) const = default;
};

using MTildeKind = std::variant<IVOutcome, WeightedZ>;
using MKind = std::variant<AverageValue, WeightedX>;

/// The pair of known linear maps defining the target. Both supported families have
/// the form c(w) * f(coordinate); the multipliers below expose c(w).
struct FunctionalPair {
  MTildeKind mtilde = IVOutcome{};
  MKind m = AverageValue{};

  /// c(w) with m~(w; g) = c(w) g(z).
  double mtilde_multiplier(const Sample& w) const;
  /// c(w) with m(w; h) = c(w) h(x).
  double m_multiplier(const Sample& w) const;
};

std::string describe(const FunctionalPair& fp);

double eval_mtilde(const FunctionalPair& fp, const Sample& w, const CoefVector& g);
double eval_m(const FunctionalPair& fp, const Sample& w, const CoefVector& h);

/// Strong Riesz representer under the pmf: r_P when `space` is over Z (for m~),
/// a_P when it is over X (for m).
CoefVector population_riesz(const FunctionalPair& fp, const JointPMF& pmf, const BasisSpec& space);

/// Moment vector E[c(W) phi_j(coordinate)] over weighted observations, for the
/// functional attached to the domain of `space`.
Eigen::VectorXd functional_moments(const FunctionalPair& fp, const Observations& obs,
                                   const BasisSpec& space);

}  // namespace lsdml
