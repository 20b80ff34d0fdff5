#include <doctest.h>

#include <random>

#include "mscat/boundary.hpp"

using namespace mscat;

namespace {

// Haar-ish random unitary: QR of a seeded complex gaussian matrix.
CMatrix random_unitary(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<CMatrix> qr(m);
  CMatrix q = qr.householderQ();
  CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    Complex d = r(j, j);
    q.col(j) *= d / std::abs(d);
  }
  return q;
}

}  // namespace

TEST_CASE("A and B from a diagonal unitary match hand values") {
  CMatrix u(2, 2);
  u << Complex(0, 1), 0.0, 0.0, 1.0;
  BoundaryCondition bc = build_boundary(u);
  CMatrix a_expect(2, 2), b_expect(2, 2);
  a_expect << Complex(0.5, 0.5), 0.0, 0.0, 1.0;
  b_expect << Complex(-0.5, -0.5), 0.0, 0.0, 0.0;
  CHECK((bc.A - a_expect).norm() < 1e-14);
  CHECK((bc.B - b_expect).norm() < 1e-14);
}

TEST_CASE("A, B satisfy the selfadjointness relations for random unitaries") {
  for (unsigned seed : {1u, 2u, 3u, 4u}) {
    for (int n : {1, 2, 3, 5}) {
      BoundaryCondition bc = build_boundary(random_unitary(n, seed * 100 + n));
      CHECK((bc.A.adjoint() * bc.B - bc.B.adjoint() * bc.A).norm() < 1e-13);
      CHECK((bc.A * bc.A.adjoint() + bc.B * bc.B.adjoint() -
             CMatrix::Identity(n, n))
                .norm() < 1e-13);
    }
  }
}

TEST_CASE("named boundary factories") {
  BoundaryCondition d = dirichlet_boundary(2);
  CHECK((d.U + CMatrix::Identity(2, 2)).norm() == 0.0);
  CHECK(d.A.norm() == 0.0);
  CHECK((d.B - (-I_UNIT) * CMatrix::Identity(2, 2)).norm() < 1e-15);

  BoundaryCondition nm = neumann_boundary(3);
  CHECK((nm.U - CMatrix::Identity(3, 3)).norm() == 0.0);
  CHECK((nm.A - CMatrix::Identity(3, 3)).norm() == 0.0);
  CHECK(nm.B.norm() == 0.0);

  // Robin: f'(0) = h f(0) must annihilate the boundary form.
  for (double h : {-2.0, 0.5, 3.0}) {
    BoundaryCondition rb = robin_boundary(h);
    CVector f0(1), fx0(1);
    f0 << 1.0;
    fx0 << h;
    CHECK(boundary_residual(f0, fx0, rb) < 1e-14);
    // and the orthogonal data must not
    fx0 << h + 1.0;
    CHECK(boundary_residual(f0, fx0, rb) > 0.1);
  }

  BoundaryCondition dr = diagonal_robin_boundary({-1.0, 2.0});
  CVector f0(2), fx0(2);
  f0 << 1.0, 1.0;
  fx0 << -1.0, 2.0;
  CHECK(boundary_residual(f0, fx0, dr) < 1e-14);
}

TEST_CASE("boundary residual of Dirichlet data") {
  // U = -1: form reduces to -i f(0), so |f(0)| = 1 gives residual 1.
  BoundaryCondition d = dirichlet_boundary(1);
  CVector f0(1), fx0(1);
  f0 << 1.0;
  fx0 << 17.0;  // derivative is free for Dirichlet
  CHECK(boundary_residual(f0, fx0, d) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("validation failures") {
  CMatrix bad = 2.0 * CMatrix::Identity(2, 2);
  CHECK_THROWS_AS(build_boundary(bad), NonUnitary);
  CMatrix rect = CMatrix::Zero(2, 3);
  CHECK_THROWS_AS(build_boundary(rect), NonSquare);
  // nearly unitary input is accepted and projected
  CMatrix nearly = (1.0 + 2e-9) * CMatrix::Identity(2, 2);
  BoundaryCondition bc = build_boundary(nearly);
  CHECK(unitarity_defect(bc.U) < 1e-14);
}

TEST_CASE("high-energy involution") {
  // no eigenvalue near -1: identity
  CMatrix u(2, 2);
  u << Complex(0, 1), 0.0, 0.0, 1.0;
  CHECK((compute_uhat(build_boundary(u)) - CMatrix::Identity(2, 2)).norm() <
        1e-14);

  // Dirichlet: -I
  CHECK((compute_uhat(dirichlet_boundary(3)) + CMatrix::Identity(3, 3))
            .norm() < 1e-14);

  // mixed diagonal: one Dirichlet channel flips sign
  CMatrix m(2, 2);
  m << std::polar(1.0, 2.5), 0.0, 0.0, -1.0;
  CMatrix uhat = compute_uhat(build_boundary(m));
  CMatrix expect(2, 2);
  expect << 1.0, 0.0, 0.0, -1.0;
  CHECK((uhat - expect).norm() < 1e-13);

  // in a rotated basis: still hermitian, unitary, involutive, eigenvectors
  // shared with U
  CMatrix v = random_unitary(3, 77);
  CMatrix diag = CMatrix::Zero(3, 3);
  diag(0, 0) = std::polar(1.0, 0.3);
  diag(1, 1) = -1.0;
  diag(2, 2) = std::polar(1.0, -2.0);
  BoundaryCondition bc = build_boundary(v * diag * v.adjoint());
  CMatrix h = compute_uhat(bc);
  CHECK(herm_defect(h) < 1e-13);
  CHECK(unitarity_defect(h) < 1e-13);
  CHECK((h * h - CMatrix::Identity(3, 3)).norm() < 1e-13);
  CHECK((h * bc.U - bc.U * h).norm() < 1e-12);
  // trace identifies the eigenvalue pattern (+1, -1, +1)
  CHECK(h.trace().real() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("Robin boundary matches its defining phase") {
  for (double h : {-3.0, -0.5, 0.0, 1.0, 10.0}) {
    BoundaryCondition rb = robin_boundary(h);
    CHECK(std::abs(rb.U(0, 0) - std::polar(1.0, -2.0 * std::atan(h))) <
          1e-15);
  }
}
