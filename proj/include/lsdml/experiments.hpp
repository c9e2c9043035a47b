#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "lsdml/config.hpp"
#include "lsdml/debiased.hpp"
#include "lsdml/dgp.hpp"
#include "lsdml/oracle.hpp"

namespace lsdml {

/// Least-squares slope of log(y) on log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

/// `count` log-spaced values from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int count);

/// Runs body(0..count-1) on up to `threads` workers. Each index writes only its own
/// slot, so results do not depend on scheduling. If any call throws, the exception
/// of the lowest failing index is rethrown after all workers stop.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

/// eta + independent N(0, scale^2) noise on every coefficient of all ten members.
NuisanceTuple perturb(const NuisanceTuple& eta, double scale, std::mt19937_64& eng);

struct TikhonovCurve {
  std::vector<double> lambdas;
  std::vector<double> h_strong_sq, h_weak_sq;  // ||h^l - h_dag||^2, ||T(h^l - h_dag)||^2
  std::vector<double> g_strong_sq, g_weak_sq;
  std::vector<double> alpha_h_ratio;  // ||T(alpha^l - alpha_dag)||^2 / lambda
  double h_strong_slope = 0.0, h_weak_slope = 0.0;
  double g_strong_slope = 0.0, g_weak_slope = 0.0;
};

TikhonovCurve tikhonov_curve(const OperatorMatrix& op, const OracleSolution& sol, std::span<const double> lambdas);

struct LearnerErrors {
  std::size_t n = 0;
  int rep = 0;
  double lambda = 0.0;
  double h_strong = 0.0, h_weak = 0.0, g_weak = 0.0, alpha_h_weak = 0.0, xi_h = 0.0, r = 0.0, a = 0.0;
};

/// Squared population-norm errors of the learners fit on one fresh sample of size n.
LearnerErrors learner_errors(const RealizedDGP& dgp, const OperatorMatrix& op, const OracleSolution& sol,
                             const EstimatorConfig& est, std::size_t n, std::uint64_t seed);

struct CoverageRow {
  std::size_t n = 0;
  int rep = 0;
  EstimateReport report;
};

/// One estimate per (n, rep) on independent samples; rows ordered by n then rep.
std::vector<CoverageRow> coverage_rows(const RealizedDGP& dgp, const EstimatorSettings& settings,
                                       std::span<const std::size_t> n_grid, int reps, std::uint64_t seed,
                                       int threads);

struct ExperimentOutput {
  std::string summary;
  std::vector<std::string> warnings;
  std::vector<std::string> files;
};

/// Run one experiment and write results.csv, summary.txt and an SVG plot into
/// config.out_dir. Plot failures become warnings.
ExperimentOutput run_experiment(const ExperimentConfig& config, ExperimentKind kind);

/// Reads a CSV with header x,y,z.
std::vector<Sample> read_samples_csv(const std::string& path);

}  // namespace lsdml
