#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mscat/interp.hpp"
#include "mscat/quadrature.hpp"

using namespace mscat;

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
  QuadRule r = gauss_legendre(16);
  REQUIRE(r.nodes.size() == 16);
  double wsum = 0.0;
  for (double w : r.weights) wsum += w;
  CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));

  // x^30 on [-1,1]: exact value 2/31, within the rule's degree 31
  double s = 0.0;
  for (size_t i = 0; i < r.nodes.size(); ++i)
    s += r.weights[i] * std::pow(r.nodes[i], 30);
  CHECK(s == doctest::Approx(2.0 / 31.0).epsilon(1e-13));
}

TEST_CASE("mapped and composite rules") {
  QuadRule r = gauss_legendre_on(12, 0.0, 2.0);
  double s = 0.0;
  for (size_t i = 0; i < r.nodes.size(); ++i)
    s += r.weights[i] * std::exp(r.nodes[i]);
  CHECK(s == doctest::Approx(std::exp(2.0) - 1.0).epsilon(1e-14));

  QuadRule c = composite_gauss(0.0, 6.0, 0.5, 16);
  CHECK(c.nodes.size() == 12 * 16);
  CHECK(std::is_sorted(c.nodes.begin(), c.nodes.end()));
  double t = 0.0;
  for (size_t i = 0; i < c.nodes.size(); ++i)
    t += c.weights[i] * std::exp(-c.nodes[i]);
  CHECK(t == doctest::Approx(1.0 - std::exp(-6.0)).epsilon(1e-14));
}

TEST_CASE("sine integral reference values") {
  // reference values accurate to ~1e-15
  CHECK(sine_integral(0.0) == 0.0);
  CHECK(sine_integral(1.0) == doctest::Approx(0.946083070367183).epsilon(1e-13));
  CHECK(sine_integral(2.0) == doctest::Approx(1.605412976802695).epsilon(1e-13));
  CHECK(sine_integral(4.0) == doctest::Approx(1.758203138949053).epsilon(1e-13));
  CHECK(sine_integral(10.0) == doctest::Approx(1.658347594218874).epsilon(1e-13));
  CHECK(sine_integral(100.0) == doctest::Approx(1.562225466889056).epsilon(1e-13));
  CHECK(sine_integral(std::numbers::pi) ==
        doctest::Approx(1.851937051982466).epsilon(1e-13));
  CHECK(sine_integral(-1.0) == doctest::Approx(-0.946083070367183));
  // both branches stay accurate right at the series/fraction switch
  CHECK(sine_integral(3.999999) ==
        doctest::Approx(1.758203328149619).epsilon(1e-13));
  CHECK(sine_integral(4.000001) ==
        doctest::Approx(1.758202949748371).epsilon(1e-13));
  // large argument tends to pi/2
  CHECK(sine_integral(1e6) ==
        doctest::Approx(std::numbers::pi / 2).epsilon(1e-5));
}

TEST_CASE("Filon weights: small and large phase agree with direct integrals") {
  // int_0^1 e^{i theta s} ds and int_0^1 s e^{i theta s} ds by fine Simpson
  auto direct = [](double theta) {
    const int m = 20000;
    Complex e(0, 0), f(0, 0);
    for (int j = 0; j <= m; ++j) {
      double s = double(j) / m;
      double w = (j == 0 || j == m) ? 1.0 : (j % 2 ? 4.0 : 2.0);
      Complex ph = std::exp(Complex(0.0, theta * s));
      e += w * ph;
      f += w * s * ph;
    }
    e /= 3.0 * m;
    f /= 3.0 * m;
    return std::pair<Complex, Complex>(e, f);
  };
  for (double theta : {0.0, 0.01, 0.3, 0.499, 0.501, 2.0, 20.0}) {
    Complex w0, w1;
    filon_weights(theta, w0, w1);
    auto [e, f] = direct(theta);
    CHECK(std::abs((w0 + w1) - e) < 1e-11);
    CHECK(std::abs(w1 - f) < 1e-11);
  }
}

TEST_CASE("Filon transform matches analytic oscillatory integrals") {
  // int_a^b e^{ikt} dk = (e^{ibt} - e^{iat}) / (it), f = 1
  double a = 0.05, b = 40.0, t = 11.7;
  int nk = 1200;
  std::vector<double> ks(nk);
  std::vector<Complex> f(nk, Complex(1.0, 0.0));
  for (int i = 0; i < nk; ++i) ks[i] = a + (b - a) * i / (nk - 1);
  Complex got = filon_transform_scalar(ks, f, t);
  Complex want = (std::exp(Complex(0, b * t)) - std::exp(Complex(0, a * t))) /
                 Complex(0, t);
  CHECK(std::abs(got - want) < 1e-12);  // exact for linear f at any t

  // smooth non-linear f: compare with a very fine trapezoid reference
  std::vector<Complex> g(nk);
  for (int i = 0; i < nk; ++i) g[i] = 1.0 / (1.0 + ks[i] * ks[i]);
  Complex got2 = filon_transform_scalar(ks, g, t);
  const int fine = 400000;
  Complex ref(0, 0);
  for (int i = 0; i <= fine; ++i) {
    double k = a + (b - a) * i / fine;
    double w = (i == 0 || i == fine) ? 0.5 : 1.0;
    ref += w * std::exp(Complex(0, k * t)) / (1.0 + k * k);
  }
  ref *= (b - a) / fine;
  // O(dk^2) interpolation of the envelope; the phase itself is exact
  CHECK(std::abs(got2 - ref) < 5e-5);

  // matrix variant consistent with scalar
  std::vector<CMatrix> gm(nk);
  for (int i = 0; i < nk; ++i) {
    gm[i] = CMatrix::Zero(2, 2);
    gm[i](0, 0) = g[i];
    gm[i](1, 1) = f[i];
  }
  CMatrix gotm = filon_transform(ks, gm, t);
  CHECK(std::abs(gotm(0, 0) - got2) < 1e-14);
  CHECK(std::abs(gotm(1, 1) - got) < 1e-14);
  CHECK(std::abs(gotm(0, 1)) == 0.0);

  // non-uniform grids are rejected
  std::vector<double> badk = ks;
  badk[5] += 1e-3;
  CHECK_THROWS_AS(filon_transform_scalar(badk, f, t), GridMismatch);
}

TEST_CASE("matrix table interpolates to fourth order") {
  auto fill = [](double t) {
    CMatrix m(2, 2);
    m << std::sin(t), Complex(0.0, std::cos(2 * t)), t * t, 1.0 / (1.0 + t);
    return m;
  };
  auto max_err = [&](int m) {
    double dt = 3.0 / (m - 1);
    std::vector<CMatrix> samples(m);
    for (int i = 0; i < m; ++i) samples[i] = fill(i * dt);
    MatrixTable tab(0.0, dt, samples);
    double err = 0.0;
    for (int j = 0; j <= 500; ++j) {
      double t = 3.0 * j / 500.0;
      err = std::max(err, (tab.eval(t) - fill(t)).norm());
    }
    return err;
  };
  double e1 = max_err(41), e2 = max_err(81);
  CHECK(e1 < 1e-4);
  CHECK(e2 < e1 / 12.0);  // ~16x reduction expected at order 4

  // nodes are reproduced exactly and the range is clamped
  std::vector<CMatrix> s(4, CMatrix::Identity(1, 1));
  MatrixTable tab(0.0, 1.0, s);
  CHECK((tab.eval(-0.5) - CMatrix::Identity(1, 1)).norm() < 1e-14);
  CHECK((tab.eval(9.0) - CMatrix::Identity(1, 1)).norm() < 1e-14);
}
