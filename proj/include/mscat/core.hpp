// Core types and error taxonomy for the half-line matrix scattering library.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace mscat {

using Real = double;
using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr Complex I_UNIT{0.0, 1.0};

// Error codes double as CLI exit codes; keep them stable.
enum class ErrorCode : int {
  Generic = 1,
  Parse = 2,
  Validation = 3,
  Solver = 4,
  InsufficientDecay = 5,
  Io = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

#define MSCAT_DEFINE_ERROR(NAME, CODE)                       \
  class NAME : public Error {                                \
   public:                                                   \
    explicit NAME(const std::string& what)                   \
        : Error(ErrorCode::CODE, std::string(#NAME ": ") + what) {} \
  }

MSCAT_DEFINE_ERROR(NonUnitary, Validation);
MSCAT_DEFINE_ERROR(NonSquare, Validation);
MSCAT_DEFINE_ERROR(EigendecompositionFailure, Solver);
MSCAT_DEFINE_ERROR(ShapeMismatch, Validation);
MSCAT_DEFINE_ERROR(IntegrationFailure, Solver);
MSCAT_DEFINE_ERROR(UnsupportedK, Validation);
MSCAT_DEFINE_ERROR(SingularMinus, Solver);
MSCAT_DEFINE_ERROR(RangeTooCoarse, Solver);
MSCAT_DEFINE_ERROR(NotARoot, Solver);
MSCAT_DEFINE_ERROR(IndefiniteB, Solver);
MSCAT_DEFINE_ERROR(InsufficientDecay, InsufficientDecay);
MSCAT_DEFINE_ERROR(IllConditioned, Solver);
MSCAT_DEFINE_ERROR(GridTooCoarse, Solver);
MSCAT_DEFINE_ERROR(SingularDenominator, Solver);
MSCAT_DEFINE_ERROR(NotDiagonal, Validation);
MSCAT_DEFINE_ERROR(GridMismatch, Validation);
MSCAT_DEFINE_ERROR(ParseError, Parse);
MSCAT_DEFINE_ERROR(ValidationError, Validation);
MSCAT_DEFINE_ERROR(SolverError, Solver);
MSCAT_DEFINE_ERROR(IoError, Io);

#undef MSCAT_DEFINE_ERROR

inline double fro_norm(const CMatrix& m) { return m.norm(); }

inline CMatrix herm(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

inline double herm_defect(const CMatrix& m) { return (m - m.adjoint()).norm(); }

inline double unitarity_defect(const CMatrix& u) {
  return (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).norm();
}

// Nearest unitary matrix (polar factor), via SVD.
CMatrix polar_unitary(const CMatrix& m);

// Largest |eigenvalue| of a hermitian matrix; the matrix norm used for
// potential magnitudes.
double herm_max_abs_eig(const CMatrix& q);

// Principal inverse square root of a hermitian positive definite matrix.
// Throws IndefiniteB if an eigenvalue is below eps_floor.
CMatrix herm_inv_sqrt(const CMatrix& b, double eps_floor = 1e-13);

std::string format_complex(Complex z);
std::string format_real(double v);  // %g formatting, readable for tiny values

}  // namespace mscat
