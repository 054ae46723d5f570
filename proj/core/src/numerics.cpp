#include "symmetra/numerics.hpp"

#include <cmath>

namespace symmetra {

double hermiticityDefect(const CMat& m) {
  return 0.5 * (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double maxAbs(const CMat& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

bool approxEqual(const CMat& a, const CMat& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return maxAbs(a - b) <= tol;
}

CMat hermitize(const CMat& m) { return 0.5 * (m + m.adjoint()); }

Spectrum hermitianSpectrum(const CMat& m, double tol) {
  if (m.rows() != m.cols()) throw NotHermitian("matrix is not square");
  const double defect = hermiticityDefect(m);
  if (defect > tol) {
    throw NotHermitian("Hermiticity defect " + std::to_string(defect) +
                       " exceeds tolerance " + std::to_string(tol));
  }
  const CMat h = hermitize(m);
  Eigen::SelfAdjointEigenSolver<CMat> solver(h);
  if (solver.info() != Eigen::Success) {
    throw NoConvergence("eigensolver failed");
  }
  Spectrum out;
  out.eigenvectors = solver.eigenvectors();
  out.eigenvalues.assign(solver.eigenvalues().data(),
                         solver.eigenvalues().data() + h.rows());
  const CMat defectMat =
      h * out.eigenvectors -
      out.eigenvectors * solver.eigenvalues().asDiagonal().toDenseMatrix();
  out.residual = maxAbs(defectMat);
  // Residual scales with the matrix norm; compare against a relative bound.
  const double scale = std::max(1.0, maxAbs(h));
  if (out.residual > 1e-10 * scale * h.rows()) {
    throw NoConvergence("eigen reconstruction residual " +
                        std::to_string(out.residual));
  }
  return out;
}

double maxEig(const CMat& m, double tol) {
  return hermitianSpectrum(m, tol).eigenvalues.back();
}

double minEig(const CMat& m, double tol) {
  return hermitianSpectrum(m, tol).eigenvalues.front();
}

CMat projectPSD(const CMat& m, double tol) {
  const Spectrum s = hermitianSpectrum(m, tol);
  const int n = static_cast<int>(m.rows());
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) w[i] = std::max(0.0, s.eigenvalues[i]);
  return s.eigenvectors * w.asDiagonal() * s.eigenvectors.adjoint();
}

ProjectionCheck isProjection(const CMat& m, double tol) {
  ProjectionCheck out;
  if (m.rows() != m.cols()) return out;
  const double herm = hermiticityDefect(m);
  const double idem = maxAbs(m * m - m);
  out.defect = std::max(herm, idem);
  if (out.defect > tol) return out;
  const double tr = m.trace().real();
  out.rank = static_cast<int>(std::lround(tr));
  out.isProjection = std::abs(tr - out.rank) <= std::max(tol, 1e-7);
  return out;
}

CMat identity(int dim) { return CMat::Identity(dim, dim); }

}  // namespace symmetra
