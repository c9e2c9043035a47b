#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lsdml/function_space.hpp"
#include "lsdml/functionals.hpp"
#include "lsdml/joint_pmf.hpp"

namespace lsdml {

/// A probability table given cell by cell, indexed (x_index, z_index).
struct ExplicitPMF {
  Eigen::MatrixXd prob;
  Eigen::MatrixXd y_values;
  Eigen::MatrixXd y_cond_var;
};

/// A design with a prescribed operator spectrum. `singular_values` lists the
/// non-trivial singular values of the conditional-expectation operator under
/// saturated indicator bases; the constant direction always carries singular
/// value 1 and is not listed. The operator therefore has rank
/// singular_values.size() + 1.
struct SpectralDesign {
  std::vector<double> singular_values;
  double coef_decay_beta = 1.0;
  double r_perp_mass = 0.0;
  double a_perp_mass = 0.0;
  double noise_sd = 0.0;
};

struct DGPSpec {
  std::string name;
  std::vector<double> x_support;
  std::vector<double> z_support;
  std::variant<ExplicitPMF, SpectralDesign> construction;
  std::int64_t seed_domain = 0;
  /// Functional pair for explicit tables (IVOutcome / AverageValue when unset).
  /// Spectral designs always generate their own.
  std::optional<FunctionalPair> functionals;
};

struct DGPMetadata {
  std::string name;
  std::int64_t seed_domain = 0;
  std::optional<double> beta;
  double r_perp_mass = 0.0;
  double a_perp_mass = 0.0;
  int rank = 0;
  int iterations = 0;
  std::vector<double> target_singular_values;
  std::vector<double> achieved_singular_values;
};

struct RealizedDGP {
  JointPMF pmf;
  FunctionalPair fp;
  DGPMetadata meta;

  /// Saturated indicator bases on the pmf supports.
  BasisSpec hspace() const { return BasisSpec::indicator(Domain::X, pmf.x_support()); }
  BasisSpec gspace() const { return BasisSpec::indicator(Domain::Z, pmf.z_support()); }
};

/// Build the joint law. Spectral designs start from uniform marginals with cosine
/// singular vectors and, when that table has negative cells, run a damped
/// fixed-point loop (at most 1e4 steps of size 0.1) that re-imposes the spectrum
/// and clips to nonnegative probabilities until the whitened singular values
/// match to 1e-8. Then E[Y|X,Z] = h_dag(X) + r_perp(Z), with r_parallel carrying
/// coefficient s_i^(beta+1) on the i-th left singular vector, and the m-weight is
/// set to a_P, whose parallel part follows the same decay.
RealizedDGP realize(const DGPSpec& spec);

/// n i.i.d. draws: (x, z) from prob, y = E[Y|x,z] + Gaussian noise with the cell variance.
std::vector<Sample> sample(const JointPMF& pmf, std::size_t n, std::uint64_t seed);

/// x,z,prob,y_mean,y_var per support cell.
void write_pmf_csv(std::ostream& os, const JointPMF& pmf);

}  // namespace lsdml
