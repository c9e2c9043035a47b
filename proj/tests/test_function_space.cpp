#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "lsdml/errors.hpp"
#include "lsdml/function_space.hpp"
#include "lsdml/rng.hpp"
#include "support.hpp"

using namespace lsdml;

TEST_CASE("evaluate picks basis values") {
  const auto ind = BasisSpec::indicator(Domain::X, {0.0, 1.0});
  CHECK(evaluate(ind, CoefVector(ind, Eigen::Vector2d(0.3, 0.7)), 1.0) == doctest::Approx(0.7));

  const auto poly = BasisSpec::polynomial(Domain::X, 2);
  CHECK(evaluate(poly, CoefVector(poly, Eigen::Vector3d(1, 0, 0)), -4.2) == 1.0);
  CHECK(evaluate(poly, CoefVector(poly, Eigen::Vector3d(0, 2, 1)), 3.0) == 15.0);
}

TEST_CASE("evaluate rejects mismatched or out-of-support input") {
  const auto ind = BasisSpec::indicator(Domain::X, {0.0, 1.0});
  const auto other = BasisSpec::indicator(Domain::X, {0.0, 2.0});
  CHECK_THROWS_AS(evaluate(ind, CoefVector(other, Eigen::Vector2d(1, 2)), 0.0), DimensionMismatch);
  CHECK_THROWS_AS(evaluate(ind, CoefVector(ind, Eigen::Vector2d(1, 2)), 0.5), DomainError);
}

TEST_CASE("design matrix rows") {
  const auto ind = BasisSpec::indicator(Domain::X, {0.0, 1.0});
  const std::vector<double> pts{0, 1, 1};
  Eigen::MatrixXd expected(3, 2);
  expected << 1, 0, 0, 1, 0, 1;
  CHECK(design_matrix(ind, pts) == expected);

  const std::vector<double> two{2.0};
  CHECK(design_matrix(BasisSpec::polynomial(Domain::X, 1), two) == Eigen::RowVector2d(1, 2));

  const std::vector<double> pc{0.2, 0.9};
  CHECK(design_matrix(BasisSpec::piecewise_constant(Domain::Z, {0.5}), pc) == Eigen::Matrix2d::Identity());
}

TEST_CASE("design matrix error names the offending index") {
  const auto ind = BasisSpec::indicator(Domain::X, {0.0, 1.0});
  const std::vector<double> pts{0, 1, 3};
  try {
    design_matrix(ind, pts);
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("index 2") != std::string::npos);
  }
}

TEST_CASE("piecewise bins are closed on the left") {
  const auto pc = BasisSpec::piecewise_constant(Domain::X, {0.5, 1.5});
  CHECK(pc.dimension() == 3);
  CHECK(pc.features(0.5) == Eigen::Vector3d(0, 1, 0));
  CHECK(pc.features(-10) == Eigen::Vector3d(1, 0, 0));
  CHECK(pc.features(7) == Eigen::Vector3d(0, 0, 1));
}

TEST_CASE("basis invariants") {
  CHECK_THROWS_AS(BasisSpec::indicator(Domain::X, {1.0, 0.0}), InvalidArgument);
  CHECK_THROWS_AS(BasisSpec::indicator(Domain::X, {0.0, 0.0}), InvalidArgument);
  CHECK_THROWS_AS(BasisSpec::polynomial(Domain::X, -1), InvalidArgument);
  CHECK_THROWS_AS(BasisSpec::piecewise_constant(Domain::X, {1.0, 1.0}), InvalidArgument);
  CHECK(BasisSpec::polynomial(Domain::Z, 3).dimension() == 4);
  CHECK(BasisSpec::indicator(Domain::Z, {}).dimension() == 0);
}

TEST_CASE("coefficient vector invariants") {
  const auto ind = BasisSpec::indicator(Domain::X, {0.0, 1.0});
  CHECK_THROWS_AS(CoefVector(ind, Eigen::Vector3d(1, 2, 3)), DimensionMismatch);
  CHECK_THROWS_AS(CoefVector(ind, Eigen::Vector2d(1, std::nan(""))), InvalidArgument);
  const CoefVector u(ind, Eigen::Vector2d(1, 2));
  CHECK((u + u * 2.0 - u).coefficients() == Eigen::Vector2d(2, 4));
}

TEST_CASE("gram examples") {
  const auto ind = BasisSpec::indicator(Domain::X, {0.0, 1.0});
  CHECK(gram(ind, fixtures::identity_pmf()).matrix.isApprox(Eigen::Matrix2d::Identity() * 0.5));

  const std::vector<double> s{0, 0, 1};
  const auto g = gram(ind, s);
  CHECK(g.weighting == Weighting::EmpiricalSample);
  CHECK(g.matrix(0, 0) == doctest::Approx(2.0 / 3.0));
  CHECK(g.matrix(1, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(g.matrix(0, 1) == 0.0);

  Eigen::MatrixXd p(2, 2);
  p << 0.25, 0.25, 0.25, 0.25;
  const JointPMF sym({-1.0, 1.0}, {0.0, 1.0}, p, Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(2, 2));
  const auto gp = gram(BasisSpec::polynomial(Domain::X, 1), sym);
  CHECK(gp.weighting == Weighting::PopulationPMF);
  CHECK((gp.matrix - Eigen::Matrix2d::Identity()).norm() < 1e-15);
}

TEST_CASE("gram errors") {
  const auto ind = BasisSpec::indicator(Domain::X, {0.0, 1.0});
  CHECK_THROWS_AS(gram(ind, std::span<const double>{}), InvalidArgument);
  // pmf has an X atom at 2 that the indicator basis does not cover
  CHECK_THROWS(gram(ind, fixtures::three_by_two_pmf()));
}

TEST_CASE("gram invariant checker") {
  Eigen::Matrix2d asym;
  asym << 1, 0.5, 0.4, 1;
  CHECK_THROWS(check_gram_invariants(asym));
  Eigen::Matrix2d indefinite;
  indefinite << 1, 2, 2, 1;
  CHECK_THROWS(check_gram_invariants(indefinite));
  CHECK_NOTHROW(check_gram_invariants(Eigen::Matrix2d::Identity()));
}

TEST_CASE("property: Gram inner product equals direct expectation") {
  auto eng = make_engine({11});
  const auto poly = BasisSpec::polynomial(Domain::Z, 3);
  const auto pc = BasisSpec::piecewise_constant(Domain::Z, {0.3, 1.1});
  std::vector<double> pts(40);
  for (auto& t : pts) t = 2.0 * uniform01(eng) - 0.5;
  for (const auto& space : {poly, pc}) {
    const auto g = gram(space, pts);
    for (int trial = 0; trial < 50; ++trial) {
      Eigen::VectorXd u(space.dimension()), v(space.dimension());
      for (int j = 0; j < space.dimension(); ++j) {
        u[j] = standard_normal(eng);
        v[j] = standard_normal(eng);
      }
      const CoefVector cu(space, u), cv(space, v);
      double direct = 0.0;
      for (double t : pts) direct += evaluate(space, cu, t) * evaluate(space, cv, t) / pts.size();
      CHECK(std::abs(g.inner(cu, cv) - direct) <= 1e-10 * std::max(1.0, std::abs(direct)));
    }
  }
}

TEST_CASE("property: design matrix times coefficients reproduces evaluate") {
  auto eng = make_engine({12});
  const auto poly = BasisSpec::polynomial(Domain::X, 4);
  std::vector<double> pts(25);
  for (auto& t : pts) t = 4.0 * uniform01(eng) - 2.0;
  Eigen::VectorXd c(5);
  for (int j = 0; j < 5; ++j) c[j] = standard_normal(eng);
  const Eigen::VectorXd vals = design_matrix(poly, pts) * c;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double e = evaluate(poly, CoefVector(poly, c), pts[i]);
    CHECK(std::abs(vals[static_cast<Eigen::Index>(i)] - e) <= 1e-12 * std::max(1.0, std::abs(e)));
  }
}
