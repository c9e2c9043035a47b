#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lsdml/function_space.hpp"
#include "lsdml/functionals.hpp"
#include "lsdml/joint_pmf.hpp"
#include "lsdml/score.hpp"

namespace lsdml {

/// Standard normal quantile. Rational approximation refined by one Halley step;
/// absolute error well below 1e-8 on (0, 1).
double normal_quantile(double p);

/// Tikhonov levels for the four minimax learners. Unset entries fall back to
/// default_lambda(fold size, beta).
struct Lambdas {
  std::optional<double> h, g, alpha_h, alpha_g;
};

struct ResolvedLambdas {
  double h = 0.0, g = 0.0, alpha_h = 0.0, alpha_g = 0.0;
};

enum class VariancePooling { Pooled, PerFold };

struct EstimatorConfig {
  BasisSpec hspace;
  BasisSpec gspace;
  FunctionalPair fp;
  Lambdas lambdas;
  double beta = 1.0;  // source exponent used by the default lambda rule
  bool cross_fit = true;
  double level = 0.95;
  std::uint64_t seed = 0;
  VariancePooling pooling = VariancePooling::Pooled;
};

struct FoldEstimate {
  double psi_hat = 0.0;
  double variance = 0.0;
  std::size_t n = 0;
};

struct EstimateReport {
  double psi_hat = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double level = 0.95;
  std::size_t n_eval = 0;
  std::vector<FoldEstimate> per_fold;

  bool covers(double truth) const { return ci_low <= truth && truth <= ci_high; }
};

/// Four near-equal folds of a seeded random permutation of 0..n-1. The first
/// n % 4 folds receive one extra index.
struct Partition {
  std::array<std::vector<std::size_t>, 4> folds;
};

Partition split_indices(std::size_t n, std::uint64_t seed);

/// Fold indices for the four roles in one rotation.
struct FoldRoles {
  int primary = 0;     // h-hat, g-hat
  int weak_riesz = 1;  // alpha-hat (plug-in)
  int projection = 2;  // xi-hat
  int evaluation = 3;  // score average
};

/// Rotation r assigns folds (r, r+1, r+2, r+3) mod 4 to the roles above. Without
/// cross-fitting only rotation 0 is used.
std::vector<FoldRoles> role_rotations(bool cross_fit);

ResolvedLambdas resolve_lambdas(const Lambdas& l, double beta, std::size_t n_primary, std::size_t n_weak);

/// Fit the full nuisance tuple: (h, g) on `primary`, the plug-in weak-Riesz
/// learners on `weak_riesz`, the four projections on `projection`, and (r, a) on
/// `riesz` (the union of the three fitting folds in estimate()).
NuisanceTuple fit_nuisances(const Observations& primary, const Observations& weak_riesz,
                            const Observations& projection, const Observations& riesz,
                            const EstimatorConfig& config, const ResolvedLambdas& lambdas);

/// Sample-split (optionally cross-fit) debiased estimate with a normal interval.
EstimateReport estimate(std::span<const Sample> data, const EstimatorConfig& config);

/// Score average for a frozen nuisance tuple. With Observations::population the
/// point estimate is the exact expectation and std_error is sigma_P (n_eval = 1).
EstimateReport evaluate_frozen(const Observations& eval, const NuisanceTuple& eta, const FunctionalPair& fp,
                               double level);

std::string report_csv_header();
std::string report_csv_row(const EstimateReport& r);
void write_report_text(std::ostream& os, const EstimateReport& r);

}  // namespace lsdml
