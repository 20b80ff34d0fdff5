#include <doctest.h>

#include "mscat/potential.hpp"

using namespace mscat;

TEST_CASE("zero potential") {
  PotentialSpec p = PotentialSpec::zero(3);
  CHECK(p.n() == 3);
  CHECK(p.support_bound() == 0.0);
  CHECK(p.eval(0.7).norm() == 0.0);
  CHECK(p.max_norm() == 0.0);
  CHECK(p.breakpoints().empty());
}

TEST_CASE("square well evaluation and weighted integral") {
  PotentialSpec p = PotentialSpec::square_well(-4.0, 1.0);
  CHECK(p.eval(0.5)(0, 0).real() == -4.0);
  CHECK(p.eval(1.0).norm() == 0.0);
  CHECK(p.eval(2.0).norm() == 0.0);
  CHECK(p.support_bound() == 1.0);
  CHECK(p.max_norm() == 4.0);
  REQUIRE(p.breakpoints().size() == 1);
  CHECK(p.breakpoints()[0] == 1.0);

  PotentialReport rep = validate_potential(p);
  // integral of (1+t)*4 over [0,1] is 4*(1 + 1/2) = 6
  CHECK(rep.weighted_integral == doctest::Approx(6.0).epsilon(1e-10));
  CHECK(rep.max_norm == 4.0);
  CHECK(rep.herm_defect_max == 0.0);
}

TEST_CASE("sampled potential interpolates linearly") {
  std::vector<double> grid{0.0, 1.0, 2.0};
  CMatrix q0(1, 1), q1(1, 1), q2(1, 1);
  q0 << 2.0;
  q1 << -6.0;
  q2 << 0.0;
  PotentialSpec p = PotentialSpec::sampled(grid, {q0, q1, q2});
  CHECK(p.eval(0.0)(0, 0).real() == 2.0);
  CHECK(p.eval(0.5)(0, 0).real() == doctest::Approx(-2.0));
  CHECK(p.eval(1.5)(0, 0).real() == doctest::Approx(-3.0));
  CHECK(p.eval(2.0).norm() == 0.0);
  CHECK(p.eval(5.0).norm() == 0.0);
  CHECK(p.support_bound() == 2.0);
  CHECK(p.max_norm() == doctest::Approx(6.0));
}

TEST_CASE("sampled potential tapers to an outer support bound") {
  std::vector<double> grid{0.0, 1.0};
  CMatrix q(1, 1);
  q << 4.0;
  PotentialSpec p = PotentialSpec::sampled(grid, {q, q}, 2.0);
  CHECK(p.support_bound() == 2.0);
  CHECK(p.eval(1.0)(0, 0).real() == doctest::Approx(4.0));
  CHECK(p.eval(1.5)(0, 0).real() == doctest::Approx(2.0));  // linear taper
  CHECK(p.eval(2.0).norm() == 0.0);
}

TEST_CASE("sampled potential validation failures") {
  CMatrix q(1, 1);
  q << 1.0;
  CMatrix nh(2, 2);
  nh << 0.0, 1.0, 0.0, 0.0;  // not hermitian

  CHECK_THROWS_AS(PotentialSpec::sampled({1.0, 0.5}, {q, q}),
                  ValidationError);
  CHECK_THROWS_AS(PotentialSpec::sampled({-0.5, 1.0}, {q, q}),
                  ValidationError);
  CHECK_THROWS_AS(PotentialSpec::sampled({0.0, 1.0}, {q}), ShapeMismatch);
  // support bound may not undercut the sampled range
  CHECK_THROWS_AS(PotentialSpec::sampled({0.0, 1.0}, {q, q}, 0.5),
                  ValidationError);

  PotentialSpec bad = PotentialSpec::sampled({0.0, 1.0}, {nh, nh});
  CHECK_THROWS_AS(validate_potential(bad), ValidationError);
}

TEST_CASE("matrix square well") {
  PotentialSpec p = PotentialSpec::square_well(-2.0, 0.5, 2);
  CHECK(p.n() == 2);
  CHECK((p.eval(0.2) + 2.0 * CMatrix::Identity(2, 2)).norm() < 1e-15);
}

TEST_CASE("uniform k grid") {
  KGrid g = KGrid::uniform(1e-2, 40.0, 800);
  CHECK(g.size() == 800);
  CHECK(g.values.front() == doctest::Approx(1e-2));
  CHECK(g.values.back() == doctest::Approx(40.0));
  CHECK(g.k_max == doctest::Approx(40.0));
  CHECK(g.spacing() == doctest::Approx((40.0 - 1e-2) / 799.0));

  CHECK_THROWS_AS(KGrid::uniform(0.0, 40.0, 10), UnsupportedK);
  CHECK_THROWS_AS(KGrid::uniform(-1.0, 40.0, 10), UnsupportedK);

  KGrid bad;
  bad.values = {1.0, 2.0, 4.0};
  bad.k_max = 4.0;
  CHECK_THROWS_AS(bad.spacing(), GridMismatch);
}
