#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace lsdml {

enum class Domain { X, Z };

std::string to_string(Domain d);

struct IndicatorBasis {
  std::vector<double> support;
  bool operator==(const IndicatorBasis&) const = default;
};

/// Monomials 1, t, ..., t^degree.
struct PolynomialBasis {
  int degree = 0;
  bool operator==(const PolynomialBasis&) const = default;
};

/// Bins (-inf, b_0), [b_0, b_1), ..., [b_{k-1}, inf).
struct PiecewiseConstantBasis {
  std::vector<double> breakpoints;
  bool operator==(const PiecewiseConstantBasis&) const = default;
};

using BasisKind = std::variant<IndicatorBasis, PolynomialBasis, PiecewiseConstantBasis>;

/// A finite basis over the X or Z domain. Construct through the static factories,
/// which enforce the per-kind invariants.
class BasisSpec {
 public:
  static BasisSpec indicator(Domain domain, std::vector<double> support);
  static BasisSpec polynomial(Domain domain, int degree);
  static BasisSpec piecewise_constant(Domain domain, std::vector<double> breakpoints);

  Domain domain() const { return domain_; }
  const BasisKind& kind() const { return kind_; }
  int dimension() const { return dimension_; }
  bool is_indicator() const { return std::holds_alternative<IndicatorBasis>(kind_); }

  /// Values of every basis function at `point`; throws DomainError when the point
  /// is not in an indicator support.
  Eigen::VectorXd features(double point) const;

  bool operator==(const BasisSpec&) const = default;

 private:
  BasisSpec(Domain domain, BasisKind kind, int dimension)
      : domain_(domain), kind_(std::move(kind)), dimension_(dimension) {}

  Domain domain_;
  BasisKind kind_;
  int dimension_;
};

std::string describe(const BasisSpec& space);

/// Coordinates of a function in a BasisSpec.
class CoefVector {
 public:
  CoefVector(BasisSpec space, Eigen::VectorXd coefficients);
  static CoefVector zero(const BasisSpec& space);

  const BasisSpec& space() const { return space_; }
  const Eigen::VectorXd& coefficients() const { return coef_; }
  int size() const { return static_cast<int>(coef_.size()); }
  double operator[](int j) const { return coef_[j]; }

  CoefVector operator+(const CoefVector& other) const;
  CoefVector operator-(const CoefVector& other) const;
  CoefVector operator*(double c) const;

 private:
  BasisSpec space_;
  Eigen::VectorXd coef_;
};

enum class Weighting { EmpiricalSample, PopulationPMF };

struct GramMatrix {
  BasisSpec space;
  Weighting weighting;
  Eigen::MatrixXd matrix;

  double inner(const CoefVector& u, const CoefVector& v) const;
  double norm(const CoefVector& u) const;
};

/// Throws if `g` is not symmetric within 1e-12 relative or has an eigenvalue
/// below -1e-10 times the largest one.
void check_gram_invariants(const Eigen::MatrixXd& g);

double evaluate(const BasisSpec& space, const CoefVector& coef, double point);

/// Row i holds the basis evaluated at points[i]. Errors name the offending index.
Eigen::MatrixXd design_matrix(const BasisSpec& space, std::span<const double> points);

class JointPMF;

/// Equal-weight Gram over the sample points.
GramMatrix gram(const BasisSpec& space, std::span<const double> sample);

/// Gram under the marginal of the pmf on the basis domain.
GramMatrix gram(const BasisSpec& space, const JointPMF& pmf);

}  // namespace lsdml
