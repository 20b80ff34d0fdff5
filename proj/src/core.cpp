#include "mscat/core.hpp"

#include <cstdio>

namespace mscat {

CMatrix polar_unitary(const CMatrix& m) {
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

double herm_max_abs_eig(const CMatrix& q) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm(q), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw EigendecompositionFailure("hermitian eigenvalue solve failed");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

CMatrix herm_inv_sqrt(const CMatrix& b, double eps_floor) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm(b));
  if (es.info() != Eigen::Success)
    throw EigendecompositionFailure("hermitian eigendecomposition failed");
  const auto& ev = es.eigenvalues();
  if (ev.minCoeff() <= eps_floor)
    throw IndefiniteB("matrix not positive definite, min eigenvalue " +
                      std::to_string(ev.minCoeff()));
  RVector inv_sqrt = ev.array().sqrt().inverse();
  return es.eigenvectors() * inv_sqrt.asDiagonal() *
         es.eigenvectors().adjoint();
}

std::string format_complex(Complex z) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g,%.17g", z.real(), z.imag());
  return buf;
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace mscat
