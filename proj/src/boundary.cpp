#include "mscat/boundary.hpp"

#include <cmath>

namespace mscat {

BoundaryCondition build_boundary(const CMatrix& U, double unitary_tol) {
  if (U.rows() != U.cols())
    throw NonSquare("boundary matrix is " + std::to_string(U.rows()) + "x" +
                    std::to_string(U.cols()));
  if (U.rows() == 0) throw NonSquare("boundary matrix is empty");
  double defect = unitarity_defect(U);
  if (defect > unitary_tol)
    throw NonUnitary("unitarity defect " + format_real(defect) +
                     " exceeds tolerance " + format_real(unitary_tol));
  BoundaryCondition bc;
  bc.n = static_cast<int>(U.rows());
  bc.U = polar_unitary(U);
  CMatrix id = CMatrix::Identity(bc.n, bc.n);
  bc.A = 0.5 * (bc.U + id);
  bc.B = 0.5 * I_UNIT * (bc.U - id);
  return bc;
}

BoundaryCondition robin_boundary(double h) {
  CMatrix u(1, 1);
  u(0, 0) = std::exp(Complex(0.0, -2.0 * std::atan(h)));
  return build_boundary(u);
}

BoundaryCondition diagonal_robin_boundary(const std::vector<double>& h) {
  CMatrix u = CMatrix::Zero(h.size(), h.size());
  for (size_t i = 0; i < h.size(); ++i)
    u(i, i) = std::exp(Complex(0.0, -2.0 * std::atan(h[i])));
  return build_boundary(u);
}

BoundaryCondition dirichlet_boundary(int n) {
  return build_boundary(-CMatrix::Identity(n, n));
}

BoundaryCondition neumann_boundary(int n) {
  return build_boundary(CMatrix::Identity(n, n));
}

CMatrix compute_uhat(const BoundaryCondition& bc, double angular_tol) {
  // Eigenvalues of the unitary U within angular_tol of -1 are exactly those
  // with |z + 1| < 2 sin(angular_tol / 2).  The corresponding eigenspace is
  // the near-null singular subspace of U + I, so the projector built from
  // those right singular vectors preserves eigenvectors even for clustered
  // eigenvalues.
  CMatrix shifted = bc.U + CMatrix::Identity(bc.n, bc.n);
  Eigen::JacobiSVD<CMatrix> svd(shifted,
                                Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success)
    throw EigendecompositionFailure("SVD of U + I failed");
  const double thr = 2.0 * std::sin(0.5 * angular_tol);
  CMatrix uhat = CMatrix::Identity(bc.n, bc.n);
  for (int j = 0; j < bc.n; ++j) {
    if (svd.singularValues()(j) < thr) {
      CVector v = svd.matrixV().col(j);
      uhat -= 2.0 * (v * v.adjoint());
    }
  }
  return uhat;
}

namespace {
// The boundary form (i/2)(U*-I) f0 + (1/2)(U*+I) fx0; equals A* fx0 - B* f0.
CMatrix boundary_form(const CMatrix& f0, const CMatrix& fx0,
                      const BoundaryCondition& bc) {
  if (f0.rows() != bc.n || fx0.rows() != bc.n || f0.cols() != fx0.cols())
    throw ShapeMismatch("boundary data does not match condition size");
  CMatrix ustar = bc.U.adjoint();
  CMatrix id = CMatrix::Identity(bc.n, bc.n);
  return 0.5 * I_UNIT * (ustar - id) * f0 + 0.5 * (ustar + id) * fx0;
}
}  // namespace

double boundary_residual(const CVector& f0, const CVector& fx0,
                         const BoundaryCondition& bc) {
  return boundary_form(f0, fx0, bc).norm();
}

double boundary_residual(const CMatrix& f0, const CMatrix& fx0,
                         const BoundaryCondition& bc) {
  return boundary_form(f0, fx0, bc).norm();
}

}  // namespace mscat
