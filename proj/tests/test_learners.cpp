#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lsdml/dgp.hpp"
#include "lsdml/errors.hpp"
#include "lsdml/learners.hpp"
#include "lsdml/oracle.hpp"
#include "lsdml/rng.hpp"
#include "support.hpp"

using namespace lsdml;
using fixtures::gsat;
using fixtures::hsat;

namespace {

struct World {
  RealizedDGP dgp;
  OperatorMatrix op;
  OracleSolution sol;
};

World world(const DGPSpec& spec) {
  auto d = realize(spec);
  auto op = build_operator(d.pmf, d.hspace(), d.gspace());
  auto sol = solve_oracle(op, d.pmf, d.fp);
  return {std::move(d), std::move(op), std::move(sol)};
}

World world(const JointPMF& pmf) {
  DGPSpec spec;
  spec.x_support = pmf.x_support();
  spec.z_support = pmf.z_support();
  spec.construction = ExplicitPMF{pmf.prob(), pmf.y_values(), pmf.y_cond_var()};
  return world(spec);
}

/// Saddle value of the primal objective at (theta, gamma), evaluated directly.
double objective(const Observations& obs, const BasisSpec& hs, const BasisSpec& gs, const FunctionalPair& fp,
                 const CoefVector& h, const CoefVector& g, double lambda) {
  double v = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const Sample w = obs.at(i);
    const double hx = evaluate(hs, h, w.x), gz = evaluate(gs, g, w.z);
    v += obs.weight()[i] * (2.0 * (eval_mtilde(fp, w, g) - hx * gz) - gz * gz + lambda * hx * hx);
  }
  return v;
}

}  // namespace

TEST_CASE("population moments recover the oracle targets") {
  for (const auto& w : {world(fixtures::exact_solution_spec()), world(fixtures::no_solution_spec()),
                        world(fixtures::weak_id_spec()), world(fixtures::three_by_two_pmf())}) {
    CAPTURE(w.dgp.meta.name);
    const auto pop = Observations::population(w.dgp.pmf);
    const auto hs = w.dgp.hspace(), gs = w.dgp.gspace();
    const auto& gh = w.op.gram_h();
    const auto& gg = w.op.gram_g();
    const double lam = 1e-10;
    CHECK(gh.norm(minimax_primary(pop, hs, gs, w.dgp.fp, lam).coef - w.sol.h_dag) <= 1e-5);
    CHECK(gg.norm(minimax_dual(pop, hs, gs, w.dgp.fp, lam).coef - w.sol.g_dag) <= 1e-5);
    CHECK(gh.norm(minimax_weak_riesz(pop, hs, gs, w.sol.g_dag, lam).coef - w.sol.alpha_h_dag) <= 1e-5);
    CHECK(gg.norm(minimax_weak_riesz_dual(pop, hs, gs, w.sol.h_dag, lam).coef - w.sol.alpha_g_dag) <= 1e-5);
    CHECK(gg.norm(projection_ls(pop, w.sol.h_dag, gs) - w.sol.xi_h) <= 1e-9);
    CHECK(gh.norm(projection_ls(pop, w.sol.g_dag, hs) - w.sol.xi_g) <= 1e-9);
    CHECK(gg.norm(riesz_regression(pop, gs, w.dgp.fp, RieszTarget::RHat) - w.sol.r_P) <= 1e-9);
    CHECK(gh.norm(riesz_regression(pop, hs, w.dgp.fp, RieszTarget::AHat) - w.sol.a_P) <= 1e-9);
  }
}

TEST_CASE("heavy penalty shrinks to zero") {
  const auto w = world(fixtures::exact_solution_spec());
  const auto pop = Observations::population(w.dgp.pmf);
  const auto fit = minimax_primary(pop, w.dgp.hspace(), w.dgp.gspace(), w.dgp.fp, 1e8);
  CHECK(w.op.gram_h().norm(fit.coef) <= 1e-3 * w.op.gram_h().norm(w.sol.h_dag));
  CHECK(fit.lambda == 1e8);
}

TEST_CASE("identity design recovers h from a sample") {
  const auto pmf = fixtures::identity_pmf();
  const auto w = world(pmf);
  const Observations obs(sample(pmf, 10000, 41));
  const auto fit = minimax_primary(obs, hsat(pmf), gsat(pmf), {}, 1e-3);
  CHECK(w.op.gram_h().norm(fit.coef - w.sol.h_dag) <= 0.1);
}

TEST_CASE("zero weak-Riesz input gives zero") {
  const auto pmf = fixtures::three_by_two_pmf();
  const Observations obs(sample(pmf, 200, 42));
  const auto fit = minimax_weak_riesz(obs, hsat(pmf), gsat(pmf), CoefVector::zero(gsat(pmf)), 0.1);
  CHECK(fit.coef.coefficients().norm() == 0.0);
}

TEST_CASE("projection examples") {
  const auto pmf = fixtures::identity_pmf();
  const Observations obs(sample(pmf, 300, 43));
  const CoefVector h1(hsat(pmf), Eigen::Vector2d(-2.5, 4.0));
  CHECK((projection_ls(obs, h1, gsat(pmf)).coefficients() - h1.coefficients()).norm() < 1e-8);
  CHECK(projection_ls(obs, CoefVector::zero(hsat(pmf)), gsat(pmf)).coefficients().norm() == 0.0);

  const auto gold = fixtures::three_by_two_pmf();
  const auto w = world(gold);
  const Observations big(sample(gold, 100000, 44));
  CHECK(w.op.gram_g().norm(projection_ls(big, w.sol.h_dag, gsat(gold)) - w.sol.xi_h) <= 0.05);
  CHECK(w.op.gram_g().norm(riesz_regression(big, gsat(gold), {}, RieszTarget::RHat) - w.sol.r_P) <= 0.05);
  CHECK_THROWS_AS(projection_ls(big, w.sol.h_dag, hsat(gold)), DimensionMismatch);
}

TEST_CASE("Riesz regression examples") {
  Eigen::MatrixXd p(2, 2), y(2, 2);
  p << 0.25, 0.25, 0.25, 0.25;
  y << 0, 1, 0, 1;
  const JointPMF yz({0.0, 1.0}, {0.0, 1.0}, p, y, Eigen::MatrixXd::Zero(2, 2));
  const auto pop = Observations::population(yz);
  CHECK((riesz_regression(pop, gsat(yz), {}, RieszTarget::RHat).coefficients() - Eigen::Vector2d(0, 1)).norm() <
        1e-9);
  CHECK((riesz_regression(pop, hsat(yz), {}, RieszTarget::AHat).coefficients() - Eigen::Vector2d(1, 1)).norm() <
        1e-9);
  CHECK_THROWS_AS(riesz_regression(pop, hsat(yz), {}, RieszTarget::RHat), DimensionMismatch);
}

TEST_CASE("zero-dimensional critic returns the pure ridge solution") {
  const auto pmf = fixtures::identity_pmf();
  const Observations obs(sample(pmf, 50, 45));
  const auto empty = BasisSpec::indicator(Domain::Z, {});
  const auto fit = minimax_primary(obs, hsat(pmf), empty, {}, 0.3);
  CHECK(fit.coef.coefficients().norm() == 0.0);
  CHECK(fit.critic_coef.size() == 0);
}

TEST_CASE("degenerate and invalid input") {
  const auto pmf = fixtures::three_by_two_pmf();
  const std::vector<Sample> same(40, Sample{1.0, 2.0, 0.0});
  CHECK_THROWS_AS(minimax_primary(Observations(same), hsat(pmf), gsat(pmf), {}, 0.1), SingularSystem);
  const Observations obs(sample(pmf, 100, 46));
  CHECK_THROWS_AS(minimax_primary(obs, hsat(pmf), gsat(pmf), {}, 0.0), InvalidArgument);
  CHECK_THROWS_AS(minimax_primary(obs, hsat(pmf), gsat(pmf), {}, -1.0), InvalidArgument);
  CHECK_THROWS_AS(minimax_primary(Observations(std::vector<Sample>{}), hsat(pmf), gsat(pmf), {}, 0.1),
                  InvalidArgument);
  CHECK_THROWS_AS(minimax_primary(obs, gsat(pmf), hsat(pmf), {}, 0.1), DimensionMismatch);
  try {
    minimax_primary(Observations(same), hsat(pmf), gsat(pmf), {}, 0.1);
  } catch (const SingularSystem& e) {
    CHECK(e.condition() > 0.0);
  }
}

TEST_CASE("fits are saddle points of the sample objective") {
  auto eng = make_engine({47});
  const auto hs = BasisSpec::polynomial(Domain::X, 2);
  const auto gs = BasisSpec::polynomial(Domain::Z, 3);
  std::vector<Sample> data;
  for (int i = 0; i < 40; ++i) {
    const double z = 2.0 * uniform01(eng) - 1.0;
    const double x = 0.7 * z + 0.3 * standard_normal(eng);
    data.push_back({x, x * x + 0.2 * standard_normal(eng), z});
  }
  const Observations obs(data);
  const FunctionalPair fp;
  const double lam = 0.2;
  const auto fit = minimax_primary(obs, hs, gs, fp, lam);
  const double at = objective(obs, hs, gs, fp, fit.coef, fit.critic_coef, lam);
  CHECK(at == doctest::Approx(fit.saddle_value).epsilon(1e-9));
  for (int t = 0; t < 30; ++t) {
    Eigen::VectorXd dh(3), dg(4);
    for (auto& v : dh) v = 0.1 * standard_normal(eng);
    for (auto& v : dg) v = 0.1 * standard_normal(eng);
    // the critic maximizes, the learner minimizes
    CHECK(objective(obs, hs, gs, fp, fit.coef, fit.critic_coef + CoefVector(gs, dg), lam) <= at + 1e-12);
    const CoefVector h2 = fit.coef + CoefVector(hs, dh);
    const auto best = [&] {
      // inner maximum at h2: the critic's closed form
      const auto gram_g = gram(gs, obs.z());
      Eigen::VectorXd mu = Eigen::VectorXd::Zero(4);
      Eigen::VectorXd ch = Eigen::VectorXd::Zero(4);
      for (std::size_t i = 0; i < obs.size(); ++i) {
        const auto f = gs.features(obs.z()[i]);
        mu += obs.weight()[i] * obs.y()[i] * f;
        ch += obs.weight()[i] * evaluate(hs, h2, obs.x()[i]) * f;
      }
      return CoefVector(gs, gram_g.matrix.ldlt().solve(mu - ch));
    }();
    CHECK(objective(obs, hs, gs, fp, h2, best, lam) >= at - 1e-12);
  }
}

TEST_CASE("default lambda rule") {
  CHECK(default_lambda(10000, 1.0) == doctest::Approx(0.01));
  CHECK(default_lambda(10000, 3.0) == doctest::Approx(0.01));
  CHECK(default_lambda(10000, 0.5) == doctest::Approx(std::pow(10000.0, -1.0 / 1.5)));
  CHECK_THROWS_AS(default_lambda(0, 1.0), InvalidArgument);
}

TEST_CASE("learners are deterministic") {
  const auto pmf = fixtures::three_by_two_pmf();
  const Observations obs(sample(pmf, 500, 48));
  const auto a = minimax_primary(obs, hsat(pmf), gsat(pmf), {}, 0.05);
  const auto b = minimax_primary(obs, hsat(pmf), gsat(pmf), {}, 0.05);
  CHECK(a.coef.coefficients() == b.coef.coefficients());
  CHECK(a.saddle_value == b.saddle_value);
}
