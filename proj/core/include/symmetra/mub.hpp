#pragma once

#include <array>
#include <vector>

#include "symmetra/bundle.hpp"
#include "symmetra/field.hpp"

namespace symmetra {

// Phase space F_d x F_d; the point (u1, u2) is encoded as u = u1*d + u2.
struct PhasePoint {
  int u1 = 0, u2 = 0;
};
inline int pointIndex(const FiniteField& f, PhasePoint u) {
  return u.u1 * f.q + u.u2;
}
inline PhasePoint pointFromIndex(const FiniteField& f, int u) {
  return {u / f.q, u % f.q};
}

// Symplectic form <u,v> = tr(u2 v1 - u1 v2), valued in F_p.
int symplecticForm(const FiniteField& f, int u, int v);

// Displacement operator D_u.  Odd characteristic uses
// D_u = tau^{tr(u1 u2)} X_{u1} Z_{u2} with tau = omega^{(p+1)/2}; even
// characteristic uses qubit factors i^{q_r p_r} X^{q_r} Z^{p_r} with
// q_r = tr(dual_r u1), p_r = tr(basis_r u2).
CMat displacement(const FiniteField& f, int u);
std::vector<CMat> displacementTable(const FiniteField& f);

// The d+1 rays (lines through the origin): the vertical {(0,t)} first, then
// slope-m rays {(t, m t)} for m = 0..d-1.  Points are sorted encodings.
std::vector<std::vector<int>> rays(const FiniteField& f);

// Affine lines, labelled by (ray, intercept) and flattened to the outcome
// index z = ray * d + intercept.
struct LineLabel {
  int ray = 0;
  int intercept = 0;
  int offsetPoint = 0;         // a point u0 on the line
  std::vector<int> points;     // sorted
};
std::vector<LineLabel> lineTable(const FiniteField& f);

// Projection onto the joint eigenvector labelled by the affine line
// (ray, intercept): Q = (1/d) sum_{v in ray} omega^{<u0,v>} D_v.  Odd
// characteristic only (throws EvenCharacteristic).
CMat lineProjection(const FiniteField& f, const std::vector<CMat>& disp,
                    int ray, int intercept);

// Complete set of d+1 mutually unbiased bases as an assemblage: fibre i is
// the basis attached to ray i, outcomes ordered by intercept (odd
// characteristic) or by descending joint displacement eigenvalue tuples
// (even characteristic, built from a seeded random Hermitian combination).
Assemblage mubAssemblage(const FiniteField& f);

// The net of all affine lines with their projections (odd characteristic).
struct QuantumNet {
  std::vector<LineLabel> lines;
  std::vector<CMat> projections;  // aligned with lines
};
QuantumNet quantumNet(const FiniteField& f);

// ------------------------------------------------------------ SL(2, F_d)

struct SL2 {
  int a = 1, b = 0, c = 0, d = 1;  // [[a, b], [c, d]], det = 1
  bool operator==(const SL2& o) const {
    return a == o.a && b == o.b && c == o.c && d == o.d;
  }
};

std::vector<SL2> slElements(const FiniteField& f);
SL2 slMul(const FiniteField& f, const SL2& x, const SL2& y);
SL2 slInv(const FiniteField& f, const SL2& x);
// Linear action on phase points, u -> F u.
int slApply(const FiniteField& f, const SL2& m, int u);

// Metaplectic unitary U_F with U_F D_u U_F^dagger = D_{F u} (no extra
// phase).  Odd characteristic only.
CMat slRepresentation(const FiniteField& f, const SL2& m);

// The full symmetry group SL(2,F_d) x| F_d^2 acting on the MUB assemblage:
// element (F, v) carries the unitary D_v U_F, acts on phase space by
// u -> F u + v and permutes the affine lines accordingly.
struct MubSymmetry {
  Assemblage assemblage;        // the MUB assemblage the group acts on
  SymmetryData sym;             // group + actions on the assemblage
  PermAction phasePointAction;  // same group acting on the d^2 phase points
  std::vector<SL2> slPart;      // per group element
  std::vector<int> translationPart;  // encoded v per group element
};
MubSymmetry mubSymmetryGroup(const FiniteField& f);

// Discrete Wigner function W_X(u) = (1/d^2) sum_v omega^{<u,v>} Tr(D_v^+ X),
// indexed by phase point.  Real for Hermitian X.
std::vector<double> wignerFunction(const FiniteField& f, const CMat& x);

// ------------------------------------------------- Clifford stabiliser

// Generators of the stabiliser subgroup used for rigidity in d = 2^n:
// the phase gates P_j = diag(1, i) on every qubit and CNOT_{jk} for every
// ordered pair j != k.
std::vector<CMat> cliffordStabilizerGenerators(int nQubits);

// Rigidity of the commutant of that stabiliser: the phase gates force any
// commuting operator to be diagonal, and the CNOT permutations make it
// constant on the orbits {0} and F_2^n \ {0}; hence dimension 2 with
// spanning projection |0...0><0...0|.  Supports n <= 3.
struct CliffordRigidity {
  bool rigid = false;
  int commutantDim = 0;
  std::vector<int> orbitSizes;  // orbits of the basis-state permutation group
};
CliffordRigidity cliffordStabilizerRigidity(int nQubits);

}  // namespace symmetra
