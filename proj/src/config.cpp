#include "lsdml/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "lsdml/errors.hpp"

namespace lsdml {

using nlohmann::json;

namespace {

constexpr std::pair<ExperimentKind, const char*> kExperimentNames[] = {
    {ExperimentKind::OracleInspect, "oracle"},         {ExperimentKind::BiasIdentity, "bias-identity"},
    {ExperimentKind::TikhonovRates, "tikhonov-rates"}, {ExperimentKind::LearnerRates, "learner-rates"},
    {ExperimentKind::Coverage, "coverage"},            {ExperimentKind::SingleEstimate, "estimate"},
};

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
  throw ConfigError(where + ": " + msg);
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  for (const auto& [key, _] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      fail(where, "unknown key '" + key + "'");
  }
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

std::int64_t integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<std::int64_t>();
}

std::vector<double> numbers(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

Eigen::MatrixXd matrix(const json& j, std::size_t rows, std::size_t cols, const std::string& where) {
  if (!j.is_array() || j.size() != rows)
    fail(where, "expected " + std::to_string(rows) + " rows (one per x support point)");
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const auto row = numbers(j[i], where + "[" + std::to_string(i) + "]");
    if (row.size() != cols)
      fail(where + "[" + std::to_string(i) + "]", "expected " + std::to_string(cols) + " columns (one per z support point)");
    for (std::size_t k = 0; k < cols; ++k) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = row[k];
  }
  return m;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(row);
  }
  return rows;
}

WeightFunction weight_from_json(const json& j, const std::string& where) {
  check_keys(j, {"constant", "polynomial", "table"}, where);
  if (j.size() != 1) fail(where, "exactly one of constant, polynomial, table");
  try {
    if (j.contains("constant")) return WeightFunction::constant(number(j["constant"], where + ".constant"));
    if (j.contains("polynomial")) return WeightFunction::polynomial(numbers(j["polynomial"], where + ".polynomial"));
    const json& t = j["table"];
    check_keys(t, {"points", "values"}, where + ".table");
    if (!t.contains("points") || !t.contains("values")) fail(where + ".table", "needs points and values");
    return WeightFunction::table(numbers(t["points"], where + ".table.points"),
                                 numbers(t["values"], where + ".table.values"));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    fail(where, e.what());
  }
}

json to_json(const WeightFunction& w) {
  if (const auto* t = std::get_if<WeightTable>(&w.rep()))
    return {{"table", {{"points", t->points}, {"values", t->values}}}};
  const auto& p = std::get<WeightPolynomial>(w.rep());
  if (p.coefficients.size() == 1) return {{"constant", p.coefficients[0]}};
  return {{"polynomial", p.coefficients}};
}

std::string kind_of(const json& j, const std::string& where) {
  if (!j.contains("kind") || !j["kind"].is_string()) fail(where, "missing string 'kind'");
  return j["kind"].get<std::string>();
}

bool is_sorted_unique(const std::vector<double>& v) {
  return std::adjacent_find(v.begin(), v.end(), [](double a, double b) { return !(a < b); }) == v.end();
}

}  // namespace

std::string to_string(ExperimentKind k) {
  for (const auto& [kind, name] : kExperimentNames)
    if (kind == k) return name;
  return "unknown";
}

std::optional<ExperimentKind> experiment_from_string(const std::string& s) {
  for (const auto& [kind, name] : kExperimentNames)
    if (s == name) return kind;
  return std::nullopt;
}

BasisSpec basis_from_json(const json& j, Domain domain, const std::string& where) {
  const std::string kind = kind_of(j, where);
  try {
    if (kind == "indicator") {
      check_keys(j, {"kind", "support"}, where);
      if (!j.contains("support")) fail(where, "indicator basis needs 'support'");
      return BasisSpec::indicator(domain, numbers(j["support"], where + ".support"));
    }
    if (kind == "polynomial") {
      check_keys(j, {"kind", "degree"}, where);
      if (!j.contains("degree")) fail(where, "polynomial basis needs 'degree'");
      return BasisSpec::polynomial(domain, static_cast<int>(integer(j["degree"], where + ".degree")));
    }
    if (kind == "piecewise_constant") {
      check_keys(j, {"kind", "breakpoints"}, where);
      if (!j.contains("breakpoints")) fail(where, "piecewise_constant basis needs 'breakpoints'");
      return BasisSpec::piecewise_constant(domain, numbers(j["breakpoints"], where + ".breakpoints"));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    fail(where, e.what());
  }
  fail(where, "unknown basis kind '" + kind + "' (indicator, polynomial, piecewise_constant)");
}

json to_json(const BasisSpec& b) {
  return std::visit(
      [](const auto& k) -> json {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, IndicatorBasis>) return {{"kind", "indicator"}, {"support", k.support}};
        else if constexpr (std::is_same_v<K, PolynomialBasis>) return {{"kind", "polynomial"}, {"degree", k.degree}};
        else return {{"kind", "piecewise_constant"}, {"breakpoints", k.breakpoints}};
      },
      b.kind());
}

FunctionalPair functionals_from_json(const json& j, const std::string& where) {
  check_keys(j, {"mtilde", "m"}, where);
  FunctionalPair fp;
  if (j.contains("mtilde")) {
    const std::string w = where + ".mtilde";
    const std::string kind = kind_of(j["mtilde"], w);
    if (kind == "iv_outcome") {
      check_keys(j["mtilde"], {"kind"}, w);
      fp.mtilde = IVOutcome{};
    } else if (kind == "weighted_z") {
      check_keys(j["mtilde"], {"kind", "weight"}, w);
      if (!j["mtilde"].contains("weight")) fail(w, "weighted_z needs 'weight'");
      fp.mtilde = WeightedZ{weight_from_json(j["mtilde"]["weight"], w + ".weight")};
    } else {
      fail(w, "unknown kind '" + kind + "' (iv_outcome, weighted_z)");
    }
  }
  if (j.contains("m")) {
    const std::string w = where + ".m";
    const std::string kind = kind_of(j["m"], w);
    if (kind == "average_value") {
      check_keys(j["m"], {"kind"}, w);
      fp.m = AverageValue{};
    } else if (kind == "weighted_x") {
      check_keys(j["m"], {"kind", "weight"}, w);
      if (!j["m"].contains("weight")) fail(w, "weighted_x needs 'weight'");
      fp.m = WeightedX{weight_from_json(j["m"]["weight"], w + ".weight")};
    } else {
      fail(w, "unknown kind '" + kind + "' (average_value, weighted_x)");
    }
  }
  return fp;
}

json to_json(const FunctionalPair& fp) {
  json j;
  if (const auto* wz = std::get_if<WeightedZ>(&fp.mtilde))
    j["mtilde"] = {{"kind", "weighted_z"}, {"weight", to_json(wz->weight)}};
  else
    j["mtilde"] = {{"kind", "iv_outcome"}};
  if (const auto* wx = std::get_if<WeightedX>(&fp.m))
    j["m"] = {{"kind", "weighted_x"}, {"weight", to_json(wx->weight)}};
  else
    j["m"] = {{"kind", "average_value"}};
  return j;
}

DGPSpec dgp_from_json(const json& j, const std::string& where) {
  check_keys(j, {"name", "x_support", "z_support", "seed_domain", "spectral", "explicit", "functionals"}, where);
  DGPSpec d;
  if (j.contains("name")) {
    if (!j["name"].is_string()) fail(where + ".name", "expected a string");
    d.name = j["name"].get<std::string>();
  }
  if (!j.contains("x_support") || !j.contains("z_support")) fail(where, "x_support and z_support are required");
  d.x_support = numbers(j["x_support"], where + ".x_support");
  d.z_support = numbers(j["z_support"], where + ".z_support");
  if (d.x_support.empty() || !is_sorted_unique(d.x_support))
    fail(where + ".x_support", "must be nonempty and strictly increasing");
  if (d.z_support.empty() || !is_sorted_unique(d.z_support))
    fail(where + ".z_support", "must be nonempty and strictly increasing");
  if (j.contains("seed_domain")) d.seed_domain = integer(j["seed_domain"], where + ".seed_domain");
  if (j.contains("spectral") == j.contains("explicit")) fail(where, "exactly one of 'spectral' or 'explicit'");

  if (j.contains("spectral")) {
    const std::string w = where + ".spectral";
    const json& s = j["spectral"];
    check_keys(s, {"singular_values", "coef_decay_beta", "r_perp_mass", "a_perp_mass", "noise_sd"}, w);
    SpectralDesign sd;
    if (!s.contains("singular_values")) fail(w, "singular_values is required");
    sd.singular_values = numbers(s["singular_values"], w + ".singular_values");
    if (s.contains("coef_decay_beta")) sd.coef_decay_beta = number(s["coef_decay_beta"], w + ".coef_decay_beta");
    if (s.contains("r_perp_mass")) sd.r_perp_mass = number(s["r_perp_mass"], w + ".r_perp_mass");
    if (s.contains("a_perp_mass")) sd.a_perp_mass = number(s["a_perp_mass"], w + ".a_perp_mass");
    if (s.contains("noise_sd")) sd.noise_sd = number(s["noise_sd"], w + ".noise_sd");
    if (j.contains("functionals")) fail(where + ".functionals", "spectral designs define their own functionals");
    d.construction = sd;
  } else {
    const std::string w = where + ".explicit";
    const json& e = j["explicit"];
    check_keys(e, {"prob", "y_values", "y_cond_var"}, w);
    if (!e.contains("prob") || !e.contains("y_values")) fail(w, "prob and y_values are required");
    const auto nx = d.x_support.size(), nz = d.z_support.size();
    ExplicitPMF ex;
    ex.prob = matrix(e["prob"], nx, nz, w + ".prob");
    ex.y_values = matrix(e["y_values"], nx, nz, w + ".y_values");
    if (!e.contains("y_cond_var"))
      ex.y_cond_var = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nx), static_cast<Eigen::Index>(nz));
    else if (e["y_cond_var"].is_number())
      ex.y_cond_var = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(nx), static_cast<Eigen::Index>(nz),
                                                number(e["y_cond_var"], w + ".y_cond_var"));
    else
      ex.y_cond_var = matrix(e["y_cond_var"], nx, nz, w + ".y_cond_var");
    d.construction = ex;
    if (j.contains("functionals")) d.functionals = functionals_from_json(j["functionals"], where + ".functionals");
  }
  return d;
}

json to_json(const DGPSpec& d) {
  json j{{"name", d.name}, {"x_support", d.x_support}, {"z_support", d.z_support}, {"seed_domain", d.seed_domain}};
  if (const auto* sd = std::get_if<SpectralDesign>(&d.construction)) {
    j["spectral"] = {{"singular_values", sd->singular_values},
                     {"coef_decay_beta", sd->coef_decay_beta},
                     {"r_perp_mass", sd->r_perp_mass},
                     {"a_perp_mass", sd->a_perp_mass},
                     {"noise_sd", sd->noise_sd}};
  } else {
    const auto& ex = std::get<ExplicitPMF>(d.construction);
    j["explicit"] = {{"prob", matrix_json(ex.prob)},
                     {"y_values", matrix_json(ex.y_values)},
                     {"y_cond_var", matrix_json(ex.y_cond_var)}};
    if (d.functionals) j["functionals"] = to_json(*d.functionals);
  }
  return j;
}

namespace {

EstimatorSettings estimator_from_json(const json& j, const std::string& where) {
  check_keys(j, {"hspace", "gspace", "lambdas", "beta", "cross_fit", "level", "pooling"}, where);
  EstimatorSettings s;
  if (j.contains("hspace")) s.hspace = basis_from_json(j["hspace"], Domain::X, where + ".hspace");
  if (j.contains("gspace")) s.gspace = basis_from_json(j["gspace"], Domain::Z, where + ".gspace");
  if (j.contains("lambdas")) {
    const std::string w = where + ".lambdas";
    const json& l = j["lambdas"];
    check_keys(l, {"h", "g", "alpha_h", "alpha_g"}, w);
    auto read = [&](const char* key, std::optional<double>& out) {
      if (!l.contains(key)) return;
      out = number(l[key], w + "." + key);
      if (!(*out > 0.0)) fail(w + "." + key, "must be positive");
    };
    read("h", s.lambdas.h);
    read("g", s.lambdas.g);
    read("alpha_h", s.lambdas.alpha_h);
    read("alpha_g", s.lambdas.alpha_g);
  }
  if (j.contains("beta")) {
    s.beta = number(j["beta"], where + ".beta");
    if (!(*s.beta > 0.0)) fail(where + ".beta", "must be positive");
  }
  if (j.contains("cross_fit")) {
    if (!j["cross_fit"].is_boolean()) fail(where + ".cross_fit", "expected true or false");
    s.cross_fit = j["cross_fit"].get<bool>();
  }
  if (j.contains("level")) {
    s.level = number(j["level"], where + ".level");
    if (!(s.level > 0.0 && s.level < 1.0)) fail(where + ".level", "must lie in (0, 1)");
  }
  if (j.contains("pooling")) {
    const std::string p = j["pooling"].is_string() ? j["pooling"].get<std::string>() : "";
    if (p == "pooled") s.pooling = VariancePooling::Pooled;
    else if (p == "per_fold") s.pooling = VariancePooling::PerFold;
    else fail(where + ".pooling", "expected \"pooled\" or \"per_fold\"");
  }
  return s;
}

json to_json(const EstimatorSettings& s) {
  json j{{"cross_fit", s.cross_fit},
         {"level", s.level},
         {"pooling", s.pooling == VariancePooling::Pooled ? "pooled" : "per_fold"}};
  if (s.hspace) j["hspace"] = to_json(*s.hspace);
  if (s.gspace) j["gspace"] = to_json(*s.gspace);
  if (s.beta) j["beta"] = *s.beta;
  json l = json::object();
  if (s.lambdas.h) l["h"] = *s.lambdas.h;
  if (s.lambdas.g) l["g"] = *s.lambdas.g;
  if (s.lambdas.alpha_h) l["alpha_h"] = *s.lambdas.alpha_h;
  if (s.lambdas.alpha_g) l["alpha_g"] = *s.lambdas.alpha_g;
  if (!l.empty()) j["lambdas"] = l;
  return j;
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  check_keys(j, {"experiment", "dgp", "estimator", "reps", "n_grid", "lambda_grid", "seed", "out_dir", "threads",
                 "data"},
             "config");
  ExperimentConfig c;
  if (j.contains("experiment")) {
    const std::string e = j["experiment"].is_string() ? j["experiment"].get<std::string>() : "";
    c.experiment = experiment_from_string(e);
    if (!c.experiment) fail("config.experiment", "unknown experiment '" + e + "'");
  }
  if (!j.contains("dgp")) fail("config", "'dgp' is required");
  c.dgp = dgp_from_json(j["dgp"], "config.dgp");
  if (j.contains("estimator")) c.estimator = estimator_from_json(j["estimator"], "config.estimator");
  if (j.contains("reps")) {
    const auto r = integer(j["reps"], "config.reps");
    if (r < 1) fail("config.reps", "must be at least 1");
    c.reps = static_cast<int>(r);
  }
  if (j.contains("n_grid")) {
    if (!j["n_grid"].is_array()) fail("config.n_grid", "expected an array of integers");
    for (std::size_t i = 0; i < j["n_grid"].size(); ++i) {
      const auto n = integer(j["n_grid"][i], "config.n_grid[" + std::to_string(i) + "]");
      if (n < 1) fail("config.n_grid[" + std::to_string(i) + "]", "must be positive");
      c.n_grid.push_back(static_cast<std::size_t>(n));
    }
  }
  if (j.contains("lambda_grid")) {
    c.lambda_grid = numbers(j["lambda_grid"], "config.lambda_grid");
    for (double l : c.lambda_grid)
      if (!(l > 0.0)) fail("config.lambda_grid", "entries must be positive");
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer() || (j["seed"].is_number_integer() && !j["seed"].is_number_unsigned() &&
                                           j["seed"].get<std::int64_t>() < 0))
      fail("config.seed", "expected a nonnegative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("out_dir")) {
    if (!j["out_dir"].is_string()) fail("config.out_dir", "expected a string");
    c.out_dir = j["out_dir"].get<std::string>();
  }
  if (j.contains("threads")) {
    const auto t = integer(j["threads"], "config.threads");
    if (t < 1) fail("config.threads", "must be at least 1");
    c.threads = static_cast<int>(t);
  }
  if (j.contains("data")) {
    if (!j["data"].is_string()) fail("config.data", "expected a path string");
    c.data_path = j["data"].get<std::string>();
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
  json j{{"dgp", to_json(c.dgp)}, {"estimator", to_json(c.estimator)}, {"reps", c.reps},
         {"n_grid", c.n_grid},   {"lambda_grid", c.lambda_grid},       {"seed", c.seed},
         {"out_dir", c.out_dir}, {"threads", c.threads}};
  if (c.experiment) j["experiment"] = to_string(*c.experiment);
  if (c.data_path) j["data"] = *c.data_path;
  return j;
}

EstimatorConfig make_estimator_config(const EstimatorSettings& s, const RealizedDGP& dgp, std::uint64_t seed) {
  EstimatorConfig c{
      .hspace = s.hspace.value_or(dgp.hspace()),
      .gspace = s.gspace.value_or(dgp.gspace()),
      .fp = dgp.fp,
      .lambdas = s.lambdas,
      .beta = s.beta.value_or(dgp.meta.beta.value_or(1.0)),
      .cross_fit = s.cross_fit,
      .level = s.level,
      .seed = seed,
      .pooling = s.pooling,
  };
  return c;
}

std::vector<std::string> config_warnings(const ExperimentConfig& c) {
  std::vector<std::string> out;
  auto check = [&](const std::optional<BasisSpec>& b, const std::vector<double>& support, const char* name) {
    if (!b) return;
    const auto* ind = std::get_if<IndicatorBasis>(&b->kind());
    if (!ind || ind->support != support)
      out.push_back(std::string(name) + " is not the saturated indicator basis on the DGP support; "
                    "the sieve need not be closed under the operator");
  };
  check(c.estimator.hspace, c.dgp.x_support, "estimator.hspace");
  check(c.estimator.gspace, c.dgp.z_support, "estimator.gspace");
  return out;
}

}  // namespace lsdml
