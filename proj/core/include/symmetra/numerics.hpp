#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "symmetra/errors.hpp"

namespace symmetra {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

// Default tolerance for Hermiticity / reconstruction checks.
inline constexpr double kHermTol = 1e-9;

// Eigendecomposition of a Hermitian matrix.
struct Spectrum {
  std::vector<double> eigenvalues;  // ascending
  CMat eigenvectors;                // columns, same order
  double residual = 0.0;            // max-abs entry of m*V - V*diag(w)
};

// Largest entrywise |m - m^dagger| / 2 deviation from Hermiticity.
double hermiticityDefect(const CMat& m);

// Entrywise max modulus.
double maxAbs(const CMat& m);

// True when every entry of a - b has modulus <= tol.
bool approxEqual(const CMat& a, const CMat& b, double tol = kHermTol);

// Hermitian part (m + m^dagger) / 2.
CMat hermitize(const CMat& m);

// Full spectrum of a Hermitian matrix.  Throws NotHermitian when the
// Hermiticity defect exceeds tol and NoConvergence when the reconstruction
// residual of the solver is not small.
Spectrum hermitianSpectrum(const CMat& m, double tol = kHermTol);

// Extreme eigenvalues of a Hermitian matrix.
double maxEig(const CMat& m, double tol = kHermTol);
double minEig(const CMat& m, double tol = kHermTol);

// Nearest (Frobenius) positive semidefinite matrix: clip negative eigenvalues.
CMat projectPSD(const CMat& m, double tol = kHermTol);

// Projection test: Hermitian, idempotent, with rank = rounded trace.
struct ProjectionCheck {
  bool isProjection = false;
  int rank = 0;        // rounded trace; only meaningful when isProjection
  double defect = 0.0;  // max of Hermiticity and idempotency defects
};
ProjectionCheck isProjection(const CMat& m, double tol = kHermTol);

// Identity matrix shorthand.
CMat identity(int dim);

}  // namespace symmetra
