#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lsdml/debiased.hpp"
#include "lsdml/dgp.hpp"
#include "lsdml/function_space.hpp"
#include "lsdml/functionals.hpp"

namespace lsdml {

enum class ExperimentKind { OracleInspect, BiasIdentity, TikhonovRates, LearnerRates, Coverage, SingleEstimate };

/// CLI subcommand name ("oracle", "bias-identity", ...).
std::string to_string(ExperimentKind k);
std::optional<ExperimentKind> experiment_from_string(const std::string& s);

/// Estimator settings as written in a config. Unset bases mean saturated indicator
/// bases on the DGP supports; an unset beta means the DGP's own beta (or 1).
struct EstimatorSettings {
  std::optional<BasisSpec> hspace;
  std::optional<BasisSpec> gspace;
  Lambdas lambdas;
  std::optional<double> beta;
  bool cross_fit = true;
  double level = 0.95;
  VariancePooling pooling = VariancePooling::Pooled;
};

struct ExperimentConfig {
  std::optional<ExperimentKind> experiment;
  DGPSpec dgp;
  EstimatorSettings estimator;
  int reps = 1;
  std::vector<std::size_t> n_grid;
  std::vector<double> lambda_grid;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  int threads = 1;
  /// Optional CSV (header x,y,z) used by the single-estimate experiment instead of a DGP draw.
  std::optional<std::string> data_path;
};

/// Parse and validate. Throws ConfigError with the JSON path of the offending key.
ExperimentConfig parse_config(const nlohmann::json& j);
/// Read a file and parse it; IoError when unreadable, ConfigError when malformed.
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& c);

BasisSpec basis_from_json(const nlohmann::json& j, Domain domain, const std::string& where);
nlohmann::json to_json(const BasisSpec& b);
DGPSpec dgp_from_json(const nlohmann::json& j, const std::string& where);
nlohmann::json to_json(const DGPSpec& d);
FunctionalPair functionals_from_json(const nlohmann::json& j, const std::string& where);
nlohmann::json to_json(const FunctionalPair& fp);

/// Concrete estimator configuration for a realized DGP.
EstimatorConfig make_estimator_config(const EstimatorSettings& s, const RealizedDGP& dgp, std::uint64_t seed);

/// Warnings that do not stop a run, e.g. a non-saturated basis, under which the
/// closedness of the sieve under T is no longer guaranteed.
std::vector<std::string> config_warnings(const ExperimentConfig& c);

}  // namespace lsdml
