#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "lsdml/config.hpp"
#include "lsdml/errors.hpp"
#include "lsdml/experiments.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kInfeasible = 3;
constexpr int kIoError = 4;

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> reps;
  std::optional<int> threads;
};

int run(lsdml::ExperimentKind kind, const Overrides& o) {
  using namespace lsdml;
  try {
    ExperimentConfig config = load_config(o.config_path);
    if (config.experiment && *config.experiment != kind)
      throw ConfigError(o.config_path + ": config is for '" + to_string(*config.experiment) +
                        "' but the subcommand is '" + to_string(kind) + "'");
    if (o.seed) config.seed = *o.seed;
    if (o.out_dir) config.out_dir = *o.out_dir;
    if (o.reps) config.reps = *o.reps;
    if (o.threads) config.threads = *o.threads;

    const ExperimentOutput out = run_experiment(config, kind);
    for (const auto& w : out.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << out.summary;
    for (const auto& f : out.files) std::cout << "wrote " << f << "\n";
    return kOk;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const InfeasibleDesign& e) {
    std::cerr << "infeasible design: " << e.what() << "\n";
    return kInfeasible;
  } catch (const SingularSystem& e) {
    std::cerr << "numerical failure: " << e.what() << " (condition estimate " << e.condition() << ")\n";
    return kInfeasible;
  } catch (const Error& e) {
    // Remaining library errors stem from values in the config (bad supports,
    // out-of-domain weights, too many singular values, ...).
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Debiased estimation of bilinear functionals of ill-posed inverse problems"};
  app.require_subcommand(1);

  const std::pair<lsdml::ExperimentKind, const char*> commands[] = {
      {lsdml::ExperimentKind::OracleInspect, "Exact population solution of a DGP"},
      {lsdml::ExperimentKind::BiasIdentity, "Check the exact bias expansion under random nuisance perturbations"},
      {lsdml::ExperimentKind::TikhonovRates, "Tikhonov bias against lambda with fitted log-log slopes"},
      {lsdml::ExperimentKind::LearnerRates, "Learner errors against sample size"},
      {lsdml::ExperimentKind::Coverage, "Monte Carlo coverage of the debiased confidence interval"},
      {lsdml::ExperimentKind::SingleEstimate, "One debiased estimate from a DGP draw or a data file"},
  };

  Overrides o;
  std::optional<lsdml::ExperimentKind> chosen;
  for (const auto& [kind, help] : commands) {
    auto* sub = app.add_subcommand(lsdml::to_string(kind), help);
    sub->add_option("--config", o.config_path, "experiment config (JSON)")->required();
    sub->add_option("--seed", o.seed, "override the config seed");
    sub->add_option("--out", o.out_dir, "override the output directory");
    sub->add_option("--reps", o.reps, "override the replication count")->check(CLI::PositiveNumber);
    sub->add_option("--threads", o.threads, "worker threads for replications")->check(CLI::PositiveNumber);
    sub->callback([&chosen, kind = kind] { chosen = kind; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  return run(*chosen, o);
}
