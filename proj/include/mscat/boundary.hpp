// Selfadjoint boundary conditions for the half-line matrix Schrodinger
// operator, parameterized by a unitary matrix U:
//
//   (i/2)(U* - I) f(0) + (1/2)(U* + I) f'(0) = 0.
//
// With A = (U + I)/2 and B = i(U - I)/2 the condition reads
// A* f'(0) - B* f(0) = 0, and A, B satisfy A*B = B*A, AA* + BB* = I.
#pragma once

#include "mscat/core.hpp"

namespace mscat {

struct BoundaryCondition {
  int n = 0;
  CMatrix U;  // unitary (projected)
  CMatrix A;  // (U + I)/2
  CMatrix B;  // i(U - I)/2
};

// Validates U (square, unitary within tol) and projects it to the nearest
// unitary before deriving A and B.
BoundaryCondition build_boundary(const CMatrix& U, double unitary_tol = 1e-8);

// Scalar Robin condition f'(0) = h f(0); h=0 is Neumann.  Realized by the
// phase U = exp(-2i atan(h)).
BoundaryCondition robin_boundary(double h);

// Diagonal boundary from per-channel Robin parameters.
BoundaryCondition diagonal_robin_boundary(const std::vector<double>& h);

// Dirichlet (U = -I) and Neumann (U = I) on n channels.
BoundaryCondition dirichlet_boundary(int n);
BoundaryCondition neumann_boundary(int n);

// High-energy asymptote of the scattering matrix: the hermitian unitary
// involution with the same eigenvectors as U, eigenvalue -1 exactly on the
// eigenspace of U-eigenvalues within angular tolerance of -1, +1 elsewhere.
CMatrix compute_uhat(const BoundaryCondition& bc, double angular_tol = 1e-6);

// Norm of the boundary form applied to (f(0), f'(0)); vector data uses the
// euclidean norm, matrix data the Frobenius norm.
double boundary_residual(const CVector& f0, const CVector& fx0,
                         const BoundaryCondition& bc);
double boundary_residual(const CMatrix& f0, const CMatrix& fx0,
                         const BoundaryCondition& bc);

}  // namespace mscat
