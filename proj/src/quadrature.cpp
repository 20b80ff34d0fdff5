#include "mscat/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace mscat {

QuadRule gauss_legendre(int m) {
  if (m < 1) throw ValidationError("quadrature order must be positive");
  QuadRule r;
  r.nodes.resize(m);
  r.weights.resize(m);
  const int half = (m + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Newton iteration on P_m from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < m; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = m * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.nodes[i] = -x;
    r.nodes[m - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    r.weights[i] = w;
    r.weights[m - 1 - i] = w;
  }
  return r;
}

QuadRule gauss_legendre_on(int m, double a, double b) {
  QuadRule unit = gauss_legendre(m);
  QuadRule r;
  r.nodes.resize(m);
  r.weights.resize(m);
  double mid = 0.5 * (a + b), hl = 0.5 * (b - a);
  for (int i = 0; i < m; ++i) {
    r.nodes[i] = mid + hl * unit.nodes[i];
    r.weights[i] = hl * unit.weights[i];
  }
  return r;
}

QuadRule composite_gauss(double a, double b, double panel_len, int gl_order) {
  if (!(b > a)) throw ValidationError("empty quadrature interval");
  int panels = std::max(1, (int)std::ceil((b - a) / panel_len - 1e-12));
  double h = (b - a) / panels;
  QuadRule r;
  for (int p = 0; p < panels; ++p) {
    QuadRule panel = gauss_legendre_on(gl_order, a + p * h, a + (p + 1) * h);
    r.nodes.insert(r.nodes.end(), panel.nodes.begin(), panel.nodes.end());
    r.weights.insert(r.weights.end(), panel.weights.begin(),
                     panel.weights.end());
  }
  return r;
}

double sine_integral(double x) {
  if (x < 0.0) return -sine_integral(-x);
  if (x < 4.0) {
    // power series, alternating; converges fast for x < 4
    double term = x, sum = x;
    for (int m = 1; m < 40; ++m) {
      term *= -x * x / ((2.0 * m) * (2.0 * m + 1.0));
      double add = term / (2.0 * m + 1.0);
      sum += add;
      if (std::abs(add) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
  }
  // Si(x) = pi/2 + Im E1(ix); E1 by modified Lentz continued fraction,
  // E1(z) = exp(-z) / (z + 1 - 1/(z + 3 - 4/(z + 5 - 9/(...)))).
  Complex z(0.0, x);
  Complex b = z + 1.0;
  Complex c = 1.0 / 1e-30;
  Complex d = 1.0 / b;
  Complex h = d;
  for (int i = 1; i < 200; ++i) {
    Complex an = -1.0 * i * i;
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < 1e-30) d = 1e-30;
    c = b + an / c;
    if (std::abs(c) < 1e-30) c = 1e-30;
    d = 1.0 / d;
    Complex del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  Complex e1 = std::exp(-z) * h;
  return 0.5 * std::numbers::pi + e1.imag();
}

void filon_weights(double theta, Complex& w0, Complex& w1) {
  // E = int_0^1 e^{i theta s} ds, F = int_0^1 s e^{i theta s} ds;
  // w1 = F, w0 = E - F.
  if (std::abs(theta) < 0.5) {
    // E = sum (i theta)^j / (j! (j+1)), F = sum (i theta)^j / (j! (j+2))
    Complex it(0.0, theta);
    Complex e(1.0, 0.0), f(0.5, 0.0), p(1.0, 0.0);
    for (int j = 1; j <= 16; ++j) {
      p *= it / static_cast<double>(j);
      e += p / static_cast<double>(j + 1);
      f += p / static_cast<double>(j + 2);
    }
    w1 = f;
    w0 = e - f;
    return;
  }
  Complex it(0.0, theta);
  Complex eit = std::exp(it);
  Complex e = (eit - 1.0) / it;
  Complex f = (eit * (it - 1.0) + 1.0) / (it * it);
  w1 = f;
  w0 = e - f;
}

namespace {
template <typename T>
T filon_accumulate(const std::vector<double>& ks, const std::vector<T>& f,
                   double t, const T& zero) {
  if (ks.size() != f.size() || ks.size() < 2)
    throw GridMismatch("filon grid/sample mismatch");
  double h = ks[1] - ks[0];
  for (size_t i = 1; i + 1 < ks.size(); ++i)
    if (std::abs(ks[i + 1] - ks[i] - h) > 1e-9 * std::max(1.0, std::abs(h)))
      throw GridMismatch("filon transform needs a uniform grid");
  Complex w0, w1;
  filon_weights(h * t, w0, w1);
  // e^{i k_j t} advanced by phase recursion; re-anchored periodically to
  // limit drift.
  Complex phase = std::exp(Complex(0.0, ks[0] * t));
  Complex step = std::exp(Complex(0.0, h * t));
  T acc = zero;
  for (size_t j = 0; j + 1 < ks.size(); ++j) {
    if (j % 64 == 0) phase = std::exp(Complex(0.0, ks[j] * t));
    acc += (h * phase) * (w0 * f[j] + w1 * f[j + 1]);
    phase *= step;
  }
  return acc;
}
}  // namespace

CMatrix filon_transform(const std::vector<double>& ks,
                        const std::vector<CMatrix>& f, double t) {
  if (f.empty()) throw GridMismatch("filon transform needs samples");
  CMatrix zero = CMatrix::Zero(f.front().rows(), f.front().cols());
  return filon_accumulate(ks, f, t, zero);
}

Complex filon_transform_scalar(const std::vector<double>& ks,
                               const std::vector<Complex>& f, double t) {
  return filon_accumulate(ks, f, t, Complex(0.0, 0.0));
}

}  // namespace mscat
