#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lsdml/errors.hpp"
#include "lsdml/functionals.hpp"
#include "lsdml/rng.hpp"
#include "support.hpp"

using namespace lsdml;

namespace {
const BasisSpec kZ01 = BasisSpec::indicator(Domain::Z, {0.0, 1.0});
const BasisSpec kX01 = BasisSpec::indicator(Domain::X, {0.0, 1.0});

/// E_P[c(W) f] by summing over the table.
double population_functional(const FunctionalPair& fp, const JointPMF& pmf, const CoefVector& f) {
  double s = 0.0;
  for (int i = 0; i < pmf.nx(); ++i)
    for (int j = 0; j < pmf.nz(); ++j) {
      const Sample w{pmf.x_support()[i], pmf.y_values()(i, j), pmf.z_support()[j]};
      s += pmf.prob()(i, j) * (f.space().domain() == Domain::Z ? eval_mtilde(fp, w, f) : eval_m(fp, w, f));
    }
  return s;
}
}  // namespace

TEST_CASE("eval_mtilde examples") {
  const FunctionalPair fp;
  CHECK(eval_mtilde(fp, {1, 2, 0}, CoefVector(kZ01, Eigen::Vector2d(3, 5))) == 6.0);
  CHECK(eval_mtilde(fp, {1, 0, 1}, CoefVector(kZ01, Eigen::Vector2d(3, 5))) == 0.0);
  FunctionalPair wz;
  wz.mtilde = WeightedZ{WeightFunction::constant(1.0)};
  const auto poly = BasisSpec::polynomial(Domain::Z, 0);
  CHECK(eval_mtilde(wz, {0, 9, 0.3}, CoefVector(poly, Eigen::VectorXd::Ones(1))) == 1.0);
}

TEST_CASE("eval_m examples") {
  const FunctionalPair fp;
  CHECK(eval_m(fp, {1, 0, 0}, CoefVector(kX01, Eigen::Vector2d(3, 5))) == 5.0);
  CHECK(eval_m(fp, {1, 0, 0}, CoefVector::zero(kX01)) == 0.0);
  FunctionalPair wx;
  wx.m = WeightedX{WeightFunction::polynomial({0.0, 1.0})};
  const auto poly = BasisSpec::polynomial(Domain::X, 0);
  CHECK(eval_m(wx, {2, 0, 0}, CoefVector(poly, Eigen::VectorXd::Ones(1))) == 2.0);
}

TEST_CASE("wrong-domain arguments are rejected") {
  const FunctionalPair fp;
  CHECK_THROWS_AS(eval_mtilde(fp, {0, 1, 0}, CoefVector::zero(kX01)), DimensionMismatch);
  CHECK_THROWS_AS(eval_m(fp, {0, 1, 0}, CoefVector::zero(kZ01)), DimensionMismatch);
}

TEST_CASE("weight tables look up exact points only") {
  const auto w = WeightFunction::table({0.0, 1.0}, {2.0, 3.0});
  CHECK(w(1.0) == 3.0);
  CHECK_THROWS_AS(w(0.5), DomainError);
  CHECK_THROWS_AS(WeightFunction::table({0.0, 1.0}, {1.0}), DimensionMismatch);
  CHECK_THROWS_AS(WeightFunction::table({1.0, 0.0}, {1.0, 2.0}), InvalidArgument);
}

TEST_CASE("property: both maps are linear in the function argument") {
  auto eng = make_engine({21});
  FunctionalPair fp;
  fp.mtilde = WeightedZ{WeightFunction::polynomial({0.5, -1.0, 2.0})};
  fp.m = WeightedX{WeightFunction::polynomial({1.0, 3.0})};
  const auto gz = BasisSpec::polynomial(Domain::Z, 2);
  const auto hx = BasisSpec::polynomial(Domain::X, 3);
  auto rnd = [&](const BasisSpec& s) {
    Eigen::VectorXd v(s.dimension());
    for (auto& c : v) c = standard_normal(eng);
    return CoefVector(s, v);
  };
  for (int t = 0; t < 100; ++t) {
    const Sample w{standard_normal(eng), standard_normal(eng), standard_normal(eng)};
    const double c1 = standard_normal(eng), c2 = standard_normal(eng);
    const auto g1 = rnd(gz), g2 = rnd(gz), h1 = rnd(hx), h2 = rnd(hx);
    const double lin_g = c1 * eval_mtilde(fp, w, g1) + c2 * eval_mtilde(fp, w, g2);
    CHECK(eval_mtilde(fp, w, g1 * c1 + g2 * c2) == doctest::Approx(lin_g).epsilon(1e-12));
    const double lin_h = c1 * eval_m(fp, w, h1) + c2 * eval_m(fp, w, h2);
    CHECK(eval_m(fp, w, h1 * c1 + h2 * c2) == doctest::Approx(lin_h).epsilon(1e-12));
  }
}

TEST_CASE("population_riesz examples") {
  // Y = Z on uniform {0,1}
  Eigen::MatrixXd p(2, 2), y(2, 2);
  p << 0.25, 0.25, 0.25, 0.25;
  y << 0, 1, 0, 1;
  const JointPMF pmf({0.0, 1.0}, {0.0, 1.0}, p, y, Eigen::MatrixXd::Zero(2, 2));
  const FunctionalPair fp;
  const auto r = population_riesz(fp, pmf, kZ01);
  CHECK(r.coefficients().isApprox(Eigen::Vector2d(0, 1)));

  const auto a = population_riesz(fp, pmf, BasisSpec::polynomial(Domain::X, 1));
  CHECK((a.coefficients() - Eigen::Vector2d(1, 0)).norm() < 1e-12);

  // 3x2 table with Y = X: E[Y | Z=0] = (0*.2 + 1*.1 + 2*.2)/.5, E[Y | Z=1] = (.2 + .4)/.5
  const auto gold = fixtures::three_by_two_pmf();
  const auto r3 = population_riesz(fp, gold, fixtures::gsat(gold));
  CHECK(r3[0] == doctest::Approx(1.0));
  CHECK(r3[1] == doctest::Approx(1.2));
}

TEST_CASE("property: Riesz identity under exact summation") {
  auto eng = make_engine({22});
  const auto pmf = fixtures::three_by_two_pmf();
  FunctionalPair fp;
  fp.m = WeightedX{WeightFunction::table({0, 1, 2}, {1.0, -2.0, 0.5})};
  const auto gs = BasisSpec::polynomial(Domain::Z, 1);
  const auto hs = BasisSpec::polynomial(Domain::X, 2);
  const auto r = population_riesz(fp, pmf, gs);
  const auto a = population_riesz(fp, pmf, hs);
  const auto gg = gram(gs, pmf), gh = gram(hs, pmf);
  for (int t = 0; t < 100; ++t) {
    const CoefVector g(gs, Eigen::Vector2d(standard_normal(eng), standard_normal(eng)));
    const CoefVector h(hs, Eigen::Vector3d(standard_normal(eng), standard_normal(eng), standard_normal(eng)));
    CHECK(std::abs(population_functional(fp, pmf, g) - gg.inner(r, g)) <= 1e-10);
    CHECK(std::abs(population_functional(fp, pmf, h) - gh.inner(a, h)) <= 1e-10);
  }
}
