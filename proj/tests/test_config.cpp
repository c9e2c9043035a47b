#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "lsdml/config.hpp"
#include "lsdml/errors.hpp"

using namespace lsdml;
using nlohmann::json;

namespace {

json explicit_dgp() {
  return json::parse(R"({
    "name": "tiny", "x_support": [0, 1], "z_support": [0, 1],
    "explicit": {"prob": [[0.5, 0], [0, 0.5]], "y_values": [[0, 0], [1, 1]]}
  })");
}

std::string config_error(const json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("every shipped example config parses and names its experiment") {
  int seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(LSDML_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    CAPTURE(entry.path().string());
    const auto c = load_config(entry.path().string());
    REQUIRE(c.experiment.has_value());
    CHECK(config_warnings(c).empty());
    ++seen;
  }
  CHECK(seen == 6);
}

TEST_CASE("minimal config takes the documented defaults") {
  const auto c = parse_config({{"dgp", explicit_dgp()}});
  CHECK_FALSE(c.experiment.has_value());
  CHECK(c.reps == 1);
  CHECK(c.seed == 0);
  CHECK(c.out_dir == "out");
  CHECK(c.threads == 1);
  CHECK(c.n_grid.empty());
  CHECK(c.estimator.cross_fit);
  CHECK(c.estimator.level == 0.95);
  CHECK(c.estimator.pooling == VariancePooling::Pooled);
  const auto& ex = std::get<ExplicitPMF>(c.dgp.construction);
  CHECK(ex.y_cond_var.isZero());
}

TEST_CASE("errors name the JSON path of the offending key") {
  auto j = json{{"dgp", explicit_dgp()}};
  j["dgp"]["explicit"]["probability"] = 1;
  CHECK(config_error(j).find("config.dgp.explicit: unknown key 'probability'") != std::string::npos);

  j = json{{"dgp", explicit_dgp()}, {"estimator", {{"lambdas", {{"h", -1.0}}}}}};
  CHECK(config_error(j).find("config.estimator.lambdas.h") != std::string::npos);

  j = json{{"dgp", explicit_dgp()}, {"n_grid", {100, 0}}};
  CHECK(config_error(j).find("config.n_grid[1]") != std::string::npos);

  j = json{{"dgp", explicit_dgp()}, {"experiment", "regress"}};
  CHECK(config_error(j).find("unknown experiment 'regress'") != std::string::npos);

  j = json{{"dgp", explicit_dgp()}};
  j["dgp"]["explicit"]["prob"] = json::parse("[[0.5, 0, 0], [0, 0.5, 0]]");
  CHECK(config_error(j).find("config.dgp.explicit.prob[0]") != std::string::npos);

  j = json{{"dgp", explicit_dgp()}};
  j["dgp"]["spectral"] = {{"singular_values", {0.5}}};
  CHECK(config_error(j).find("exactly one of 'spectral' or 'explicit'") != std::string::npos);

  CHECK(config_error(json{{"reps", 3}}).find("'dgp' is required") != std::string::npos);
  CHECK(config_error(json{{"dgp", explicit_dgp()}, {"seed", -4}}).find("config.seed") != std::string::npos);
}

TEST_CASE("spectral designs reject explicit functionals") {
  auto j = json::parse(R"({"dgp": {"x_support": [0, 1], "z_support": [0, 1],
                                    "spectral": {"singular_values": []},
                                    "functionals": {"m": {"kind": "average_value"}}}})");
  CHECK(config_error(j).find("config.dgp.functionals") != std::string::npos);
}

TEST_CASE("bases round-trip through JSON") {
  for (const auto& b : {BasisSpec::indicator(Domain::X, {0.0, 0.5, 2.0}), BasisSpec::polynomial(Domain::X, 3),
                        BasisSpec::piecewise_constant(Domain::X, {-1.0, 1.0})}) {
    CHECK(basis_from_json(to_json(b), Domain::X, "b") == b);
  }
  CHECK_THROWS_AS(basis_from_json(json{{"kind", "spline"}}, Domain::Z, "b"), ConfigError);
  CHECK_THROWS_AS(basis_from_json(json{{"kind", "indicator"}, {"support", {1, 0}}}, Domain::Z, "b"), ConfigError);
}

TEST_CASE("functionals and DGPs round-trip through JSON") {
  FunctionalPair fp;
  fp.mtilde = WeightedZ{WeightFunction::table({0.0, 1.0}, {2.0, -1.0})};
  fp.m = WeightedX{WeightFunction::polynomial({0.5, 1.0, -2.0})};
  const auto back = functionals_from_json(to_json(fp), "f");
  CHECK(back.mtilde == fp.mtilde);
  CHECK(back.m == fp.m);

  FunctionalPair c;
  c.m = WeightedX{WeightFunction::constant(3.0)};
  CHECK(to_json(c)["m"]["weight"] == json{{"constant", 3.0}});

  auto j = explicit_dgp();
  j["explicit"]["y_cond_var"] = 0.25;
  j["functionals"] = to_json(fp);
  const auto d = dgp_from_json(j, "d");
  const auto again = dgp_from_json(to_json(d), "d");
  CHECK(again.name == "tiny");
  const auto& ex = std::get<ExplicitPMF>(again.construction);
  CHECK(ex.y_cond_var.isConstant(0.25));
  CHECK(ex.prob == std::get<ExplicitPMF>(d.construction).prob);
  REQUIRE(again.functionals.has_value());
  CHECK(again.functionals->m == fp.m);

  const auto full = parse_config(json{{"dgp", j}, {"experiment", "coverage"}, {"n_grid", {100, 200}}, {"seed", 9}});
  const auto round = parse_config(to_json(full));
  CHECK(round.experiment == full.experiment);
  CHECK(round.n_grid == full.n_grid);
  CHECK(round.seed == 9);
}

TEST_CASE("estimator config fills saturated bases and the DGP beta") {
  const auto c = load_config(std::string(LSDML_CONFIG_DIR) + "/learner_rates.json");
  const auto dgp = realize(c.dgp);
  const auto est = make_estimator_config(c.estimator, dgp, 17);
  CHECK(est.hspace == dgp.hspace());
  CHECK(est.gspace == dgp.gspace());
  CHECK(est.beta == 1.0);
  CHECK(est.seed == 17);
  CHECK_FALSE(est.lambdas.h.has_value());

  EstimatorSettings s;
  s.beta = 2.5;
  s.lambdas.g = 0.1;
  const auto custom = make_estimator_config(s, dgp, 0);
  CHECK(custom.beta == 2.5);
  CHECK(custom.lambdas.g == 0.1);
}

TEST_CASE("non-saturated bases produce a warning, saturated ones do not") {
  auto j = json{{"dgp", explicit_dgp()},
                {"estimator", {{"hspace", {{"kind", "polynomial"}, {"degree", 1}}},
                               {"gspace", {{"kind", "indicator"}, {"support", {0, 1}}}}}}};
  const auto w = config_warnings(parse_config(j));
  REQUIRE(w.size() == 1);
  CHECK(w[0].find("estimator.hspace") == 0);
}

TEST_CASE("comments are accepted and unreadable files are I/O errors") {
  const auto dir = std::filesystem::temp_directory_path() / "lsdml_test_config";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "c.json").string();
  {
    std::ofstream out(path);
    out << "// leading comment\n{\"dgp\": " << explicit_dgp().dump() << ", /* inline */ \"reps\": 4}\n";
  }
  CHECK(load_config(path).reps == 4);
  {
    std::ofstream out(path);
    out << "{\"dgp\": ";
  }
  CHECK_THROWS_AS(load_config(path), ConfigError);
  CHECK_THROWS_AS(load_config((dir / "missing.json").string()), IoError);
}
