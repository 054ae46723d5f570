#pragma once

// Shared fixtures for the test suite: Pauli matrices, seeded random
// Hermitian/unitary matrices, small hand-built symmetric assemblages, and
// temp-file plumbing for the I/O and CLI tests.

#include <symmetra/bundle.hpp>
#include <symmetra/construct.hpp>
#include <symmetra/groups.hpp>
#include <symmetra/io.hpp>
#include <symmetra/numerics.hpp>

#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace symtest {

using symmetra::Assemblage;
using symmetra::CMat;
using symmetra::Complex;
using symmetra::GroupPtr;

inline CMat pauliX() {
  CMat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline CMat pauliY() {
  CMat m(2, 2);
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}

inline CMat pauliZ() {
  CMat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

// Qubit effect (1 + n.sigma) / 2 for a Bloch vector n.
inline CMat blochEffect(double nx, double ny, double nz) {
  CMat m(2, 2);
  m << Complex(1.0 + nz, 0.0), Complex(nx, -ny), Complex(nx, ny),
      Complex(1.0 - nz, 0.0);
  return 0.5 * m;
}

inline CMat randomHermitian(int dim, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  CMat m(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) m(r, c) = Complex(g(rng), g(rng));
  return symmetra::hermitize(m);
}

inline CMat randomUnitary(int dim, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  CMat m(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) m(r, c) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<CMat> qr(m);
  return qr.householderQ() * CMat::Identity(dim, dim);
}

// Recovers the outcome permutation table of a group acting on an assemblage
// by matching U A_z U^dagger against the effect list.  Returns an empty
// vector when some image has no match.
inline std::vector<int32_t> recoverOutcomeImages(
    const Assemblage& a, const symmetra::FiniteMatrixGroup& g,
    double tol = 1e-7) {
  const int nOut = a.bundle.outcomes();
  std::vector<int32_t> images(static_cast<size_t>(g.order()) * nOut, -1);
  for (int gi = 0; gi < g.order(); ++gi) {
    const CMat& u = g.elements[gi];
    for (int z = 0; z < nOut; ++z) {
      const CMat moved = u * a.effects[z] * u.adjoint();
      int hit = -1;
      for (int j = 0; j < nOut; ++j) {
        if (symmetra::maxAbs(moved - a.effects[j]) <= tol) {
          hit = j;
          break;
        }
      }
      if (hit < 0) return {};
      images[static_cast<size_t>(gi) * nOut + z] = hit;
    }
  }
  return images;
}

// Single computational-basis measurement on a qubit with the order-8 group
// generated by Pauli X and Z ({+-1, +-X, +-Z, +-XZ}): a minimal uniform and
// rigid example used by the bundle tests.
struct QubitExample {
  Assemblage assemblage;
  symmetra::SymmetryData sym;
};

inline QubitExample basisMeasurementExample() {
  QubitExample ex;
  ex.assemblage.dim = 2;
  ex.assemblage.bundle = symmetra::OutcomeBundle::fromFibreSizes({2});
  CMat p0 = CMat::Zero(2, 2), p1 = CMat::Zero(2, 2);
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;
  ex.assemblage.effects = {p0, p1};
  GroupPtr group = std::make_shared<const symmetra::FiniteMatrixGroup>(
      symmetra::closeGenerators({pauliX(), pauliZ()}));
  auto images = recoverOutcomeImages(ex.assemblage, *group);
  ex.sym = symmetra::makeSymmetryData(ex.assemblage, group, std::move(images));
  return ex;
}

inline GroupPtr loadGroup(const std::string& stem) {
  return symmetra::readGroupFile(
      symmetra::dataFile("groups/" + stem + ".json"));
}

// The constructed octahedron (the m = 3 projective assemblage of the binary
// octahedral group) together with its symmetry data.
inline symmetra::ConstructedAssemblage constructedOctahedron() {
  const auto result = symmetra::constructAssemblages(
      loadGroup("binary_octahedral"), symmetra::GroupingMode::projectiveMode());
  for (const auto& c : result.assemblages)
    if (c.assemblage.bundle.measurements() == 3) return c;
  throw std::runtime_error("octahedron construction missing m = 3");
}

// Writes content to a fresh temp file and returns its path.
inline std::string writeTempFile(const std::string& content,
                                 const std::string& suffix = ".json") {
  static int counter = 0;
  std::ostringstream os;
  os << "/tmp/symmetra_test_" << ::getpid() << "_" << counter++ << suffix;
  const std::string path = os.str();
  std::ofstream out(path);
  out << content;
  out.close();
  return path;
}

inline std::string readAllFile(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace symtest
