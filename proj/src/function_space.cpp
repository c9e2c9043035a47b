#include "lsdml/function_space.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lsdml/errors.hpp"
#include "lsdml/joint_pmf.hpp"

namespace lsdml {

std::string to_string(Domain d) { return d == Domain::X ? "X" : "Z"; }

BasisSpec BasisSpec::indicator(Domain domain, std::vector<double> support) {
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (!std::isfinite(support[i])) throw InvalidArgument("indicator support contains a non-finite point");
    if (i > 0 && !(support[i - 1] < support[i]))
      throw InvalidArgument("indicator support must be strictly increasing (index " +
                            std::to_string(i) + ")");
  }
  // An empty support is allowed: it is the zero-dimensional class {0}.
  const int dim = static_cast<int>(support.size());
  return BasisSpec(domain, IndicatorBasis{std::move(support)}, dim);
}

BasisSpec BasisSpec::polynomial(Domain domain, int degree) {
  if (degree < 0) throw InvalidArgument("polynomial degree must be nonnegative");
  return BasisSpec(domain, PolynomialBasis{degree}, degree + 1);
}

BasisSpec BasisSpec::piecewise_constant(Domain domain, std::vector<double> breakpoints) {
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    if (!std::isfinite(breakpoints[i])) throw InvalidArgument("breakpoints must be finite");
    if (i > 0 && !(breakpoints[i - 1] < breakpoints[i]))
      throw InvalidArgument("breakpoints must be strictly increasing");
  }
  const int dim = static_cast<int>(breakpoints.size()) + 1;
  return BasisSpec(domain, PiecewiseConstantBasis{std::move(breakpoints)}, dim);
}

Eigen::VectorXd BasisSpec::features(double point) const {
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(dimension_);
  if (const auto* ind = std::get_if<IndicatorBasis>(&kind_)) {
    if (ind->support.empty()) return phi;  // the zero class is defined everywhere
    auto it = std::lower_bound(ind->support.begin(), ind->support.end(), point);
    if (it == ind->support.end() || *it != point) {
      std::ostringstream os;
      os << "point " << point << " is not in the indicator support over " << to_string(domain_);
      throw DomainError(os.str());
    }
    phi[it - ind->support.begin()] = 1.0;
  } else if (const auto* poly = std::get_if<PolynomialBasis>(&kind_)) {
    double p = 1.0;
    for (int j = 0; j <= poly->degree; ++j) {
      phi[j] = p;
      p *= point;
    }
  } else {
    const auto& pc = std::get<PiecewiseConstantBasis>(kind_);
    auto it = std::upper_bound(pc.breakpoints.begin(), pc.breakpoints.end(), point);
    phi[it - pc.breakpoints.begin()] = 1.0;
  }
  return phi;
}

std::string describe(const BasisSpec& space) {
  std::ostringstream os;
  os << to_string(space.domain()) << ":";
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, IndicatorBasis>) {
          os << "indicator(" << k.support.size() << ")";
        } else if constexpr (std::is_same_v<K, PolynomialBasis>) {
          os << "polynomial(" << k.degree << ")";
        } else {
          os << "piecewise(" << k.breakpoints.size() + 1 << ")";
        }
      },
      space.kind());
  return os.str();
}

CoefVector::CoefVector(BasisSpec space, Eigen::VectorXd coefficients)
    : space_(std::move(space)), coef_(std::move(coefficients)) {
  if (coef_.size() != space_.dimension())
    throw DimensionMismatch("coefficient vector has length " + std::to_string(coef_.size()) +
                            " but " + describe(space_) + " has dimension " +
                            std::to_string(space_.dimension()));
  if (!coef_.allFinite()) throw InvalidArgument("coefficient vector has non-finite entries");
}

CoefVector CoefVector::zero(const BasisSpec& space) {
  return CoefVector(space, Eigen::VectorXd::Zero(space.dimension()));
}

CoefVector CoefVector::operator+(const CoefVector& other) const {
  if (!(space_ == other.space_)) throw DimensionMismatch("adding coefficient vectors from different spaces");
  return CoefVector(space_, coef_ + other.coef_);
}

CoefVector CoefVector::operator-(const CoefVector& other) const {
  if (!(space_ == other.space_)) throw DimensionMismatch("subtracting coefficient vectors from different spaces");
  return CoefVector(space_, coef_ - other.coef_);
}

CoefVector CoefVector::operator*(double c) const { return CoefVector(space_, coef_ * c); }

double GramMatrix::inner(const CoefVector& u, const CoefVector& v) const {
  if (!(u.space() == space) || !(v.space() == space))
    throw DimensionMismatch("inner product of coefficient vectors outside the Gram's space");
  return u.coefficients().dot(matrix * v.coefficients());
}

double GramMatrix::norm(const CoefVector& u) const { return std::sqrt(std::max(0.0, inner(u, u))); }

void check_gram_invariants(const Eigen::MatrixXd& g) {
  if (g.rows() != g.cols()) throw DimensionMismatch("Gram matrix is not square");
  if (g.size() == 0) return;
  const double scale = g.cwiseAbs().maxCoeff();
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, 1e-300))
    throw InvalidArgument("Gram matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
  const double top = es.eigenvalues().maxCoeff();
  if (es.eigenvalues().minCoeff() < -1e-10 * std::max(top, 0.0))
    throw InvalidArgument("Gram matrix is not positive semidefinite");
}

double evaluate(const BasisSpec& space, const CoefVector& coef, double point) {
  if (!(coef.space() == space))
    throw DimensionMismatch("coefficient vector belongs to " + describe(coef.space()) +
                            ", not " + describe(space));
  return space.features(point).dot(coef.coefficients());
}

Eigen::MatrixXd design_matrix(const BasisSpec& space, std::span<const double> points) {
  Eigen::MatrixXd d(static_cast<Eigen::Index>(points.size()), space.dimension());
  for (std::size_t i = 0; i < points.size(); ++i) {
    try {
      d.row(static_cast<Eigen::Index>(i)) = space.features(points[i]).transpose();
    } catch (const DomainError& e) {
      throw DomainError("design_matrix: invalid point at index " + std::to_string(i) + ": " +
                        e.what());
    }
  }
  return d;
}

GramMatrix gram(const BasisSpec& space, std::span<const double> sample) {
  if (sample.empty()) throw InvalidArgument("gram: empty sample");
  const Eigen::MatrixXd d = design_matrix(space, sample);
  Eigen::MatrixXd g = d.transpose() * d / static_cast<double>(sample.size());
  g = 0.5 * (g + g.transpose());
  check_gram_invariants(g);
  return {space, Weighting::EmpiricalSample, std::move(g)};
}

GramMatrix gram(const BasisSpec& space, const JointPMF& pmf) {
  const bool on_x = space.domain() == Domain::X;
  const auto& support = on_x ? pmf.x_support() : pmf.z_support();
  const Eigen::VectorXd marginal = on_x ? pmf.x_marginal() : pmf.z_marginal();
  if (const auto* ind = std::get_if<IndicatorBasis>(&space.kind())) {
    for (double s : support) {
      if (!std::binary_search(ind->support.begin(), ind->support.end(), s))
        throw DimensionMismatch("gram: pmf " + to_string(space.domain()) +
                                "-marginal has an atom outside the indicator support");
    }
  }
  const Eigen::MatrixXd d = design_matrix(space, support);
  Eigen::MatrixXd g = d.transpose() * marginal.asDiagonal() * d;
  g = 0.5 * (g + g.transpose());
  check_gram_invariants(g);
  return {space, Weighting::PopulationPMF, std::move(g)};
}

}  // namespace lsdml
