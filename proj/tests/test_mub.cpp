#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <symmetra/errors.hpp>
#include <symmetra/field.hpp>
#include <symmetra/mub.hpp>

#include <cmath>
#include <set>

#include "support/helpers.hpp"

using namespace symmetra;

namespace {

bool isPrimePowerList(int q) {
  for (int x : {2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 27, 32, 49, 64})
    if (x == q) return true;
  return false;
}

}  // namespace

TEST_CASE("buildField produces consistent field tables") {
  for (int q : {2, 3, 4, 5, 7, 8, 9, 16, 25, 27}) {
    const FiniteField f = buildField(q);
    CHECK(f.q == q);
    CHECK(isPrimePowerList(f.q));
    // Field axioms, spot-checked exhaustively for these sizes.
    for (int a = 0; a < q; ++a) {
      CHECK(f.add(a, 0) == a);
      CHECK(f.mul(a, 1) == a);
      CHECK(f.add(a, f.neg(a)) == 0);
      if (a != 0) CHECK(f.mul(a, f.inv(a)) == 1);
      for (int b = 0; b < q; ++b) {
        CHECK(f.add(a, b) == f.add(b, a));
        CHECK(f.mul(a, b) == f.mul(b, a));
        for (int c = 0; c < q; ++c) {
          CHECK(f.add(f.add(a, b), c) == f.add(a, f.add(b, c)));
          CHECK(f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c)));
          CHECK(f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c)));
        }
      }
    }
    // Frobenius fixes exactly the prime field: #{a : a^p = a} = p.
    int fixed = 0;
    for (int a = 0; a < q; ++a)
      if (f.pow(a, static_cast<uint64_t>(f.p)) == a) ++fixed;
    CHECK(fixed == f.p);
  }
}

TEST_CASE("trace map and dual basis") {
  for (int q : {4, 8, 9, 25, 27}) {
    const FiniteField f = buildField(q);
    // Trace is F_p-linear into the prime field.
    for (int a = 0; a < q; ++a) {
      CHECK(f.trace(a) >= 0);
      CHECK(f.trace(a) < f.p);
      for (int b = 0; b < q; ++b)
        CHECK((f.trace(a) + f.trace(b)) % f.p == f.trace(f.add(a, b)));
    }
    // Non-degenerate: some element has nonzero trace.
    bool nonzero = false;
    for (int a = 0; a < q; ++a) nonzero = nonzero || f.trace(a) != 0;
    CHECK(nonzero);
    // Duality: tr(e_i * dual_j) = delta_ij.
    REQUIRE(static_cast<int>(f.basis.size()) == f.n);
    REQUIRE(static_cast<int>(f.dualBasis.size()) == f.n);
    for (int i = 0; i < f.n; ++i)
      for (int j = 0; j < f.n; ++j)
        CHECK(f.trace(f.mul(f.basis[i], f.dualBasis[j])) ==
              (i == j ? 1 : 0));
  }
}

TEST_CASE("buildField rejects non-prime-powers and oversize inputs") {
  CHECK_THROWS_AS(buildField(6), NotPrime);
  CHECK_THROWS_AS(buildField(10), NotPrime);
  CHECK_THROWS_AS(buildField(12), NotPrime);
  CHECK_THROWS_AS(buildField(1), NotPrime);
  CHECK_THROWS_AS(buildField(128), TooLarge);
  CHECK(buildField(2, 5).q == 32);
}

TEST_CASE("symplectic form is bilinear and antisymmetric") {
  for (int q : {3, 4, 5}) {
    const FiniteField f = buildField(q);
    for (int u = 0; u < q * q; ++u)
      for (int v = 0; v < q * q; ++v) {
        const int uv = symplecticForm(f, u, v);
        const int vu = symplecticForm(f, v, u);
        CHECK((uv + vu) % f.p == 0);  // antisymmetric mod p
      }
    // Non-degenerate: for u != 0 some v pairs nontrivially.
    for (int u = 1; u < q * q; ++u) {
      bool hit = false;
      for (int v = 0; v < q * q && !hit; ++v)
        hit = symplecticForm(f, u, v) != 0;
      CHECK(hit);
    }
  }
}

TEST_CASE("displacement operators satisfy the Weyl relations") {
  for (int q : {2, 3, 4, 5}) {
    const FiniteField f = buildField(q);
    const auto disp = displacementTable(f);
    REQUIRE(static_cast<int>(disp.size()) == q * q);
    CHECK(maxAbs(disp[0] - CMat::Identity(q, q)) <= 1e-12);
    const double omegaArg = 2.0 * M_PI / f.p;
    for (int u = 0; u < q * q; ++u) {
      // Unitary.
      CHECK(maxAbs(disp[u] * disp[u].adjoint() - CMat::Identity(q, q)) <=
            1e-11);
      for (int v = 0; v < q * q; ++v) {
        // D_u D_v is proportional to D_{u+v} by a unimodular phase...
        const PhasePoint pu = pointFromIndex(f, u);
        const PhasePoint pv = pointFromIndex(f, v);
        const int sum = pointIndex(
            f, {f.add(pu.u1, pv.u1), f.add(pu.u2, pv.u2)});
        const CMat prod = disp[u] * disp[v];
        const Complex ratio =
            (disp[sum].adjoint() * prod).trace() / static_cast<double>(q);
        CHECK(std::abs(std::abs(ratio) - 1.0) <= 1e-10);
        CHECK(maxAbs(prod - ratio * disp[sum]) <= 1e-10);
        // ... and the commutation phase is the symplectic form.
        const Complex expected =
            std::polar(1.0, omegaArg * symplecticForm(f, u, v));
        const CMat lhs = disp[u] * disp[v];
        const CMat rhs = expected * disp[v] * disp[u];
        CHECK(maxAbs(lhs - rhs) <= 1e-10);
      }
    }
  }
}

TEST_CASE("rays partition the punctured phase space") {
  for (int q : {2, 3, 4, 5, 7, 8, 9}) {
    const FiniteField f = buildField(q);
    const auto r = rays(f);
    REQUIRE(static_cast<int>(r.size()) == q + 1);
    std::set<int> seen;
    for (const auto& ray : r) {
      CHECK(static_cast<int>(ray.size()) == q);
      bool hasZero = false;
      for (int u : ray) {
        if (u == 0)
          hasZero = true;
        else
          CHECK(seen.insert(u).second);  // nonzero points appear once
      }
      CHECK(hasZero);
    }
    CHECK(static_cast<int>(seen.size()) == q * q - 1);
  }
}

TEST_CASE("line projections are rank one and bases are orthonormal") {
  for (int q : {3, 5, 7}) {
    const FiniteField f = buildField(q);
    const auto disp = displacementTable(f);
    for (int ray = 0; ray < q + 1; ++ray) {
      CMat sum = CMat::Zero(q, q);
      for (int t = 0; t < q; ++t) {
        const CMat p = lineProjection(f, disp, ray, t);
        const auto check = isProjection(p, 1e-9);
        CHECK(check.isProjection);
        CHECK(check.rank == 1);
        sum += p;
      }
      CHECK(maxAbs(sum - CMat::Identity(q, q)) <= 1e-10);
    }
  }
  CHECK_THROWS_AS(
      lineProjection(buildField(4), displacementTable(buildField(4)), 0, 0),
      EvenCharacteristic);
}

TEST_CASE("mubAssemblage bases are mutually unbiased for d = 2..9") {
  for (int q : {2, 3, 4, 5, 7, 8, 9}) {
    const FiniteField f = buildField(q);
    const Assemblage a = mubAssemblage(f);
    CHECK(a.dim == q);
    CHECK(a.bundle.measurements() == q + 1);
    for (int x = 0; x < a.bundle.measurements(); ++x)
      CHECK(a.bundle.fibreSizes[x] == q);
    CHECK(checkNormalization(a, 1e-10).ok);
    // Every effect is a rank-one projection; distinct bases are unbiased.
    for (int z = 0; z < a.bundle.outcomes(); ++z) {
      const auto check = isProjection(a.effects[z], 1e-8);
      CHECK(check.isProjection);
      CHECK(check.rank == 1);
    }
    for (int z = 0; z < a.bundle.outcomes(); ++z)
      for (int w = z + 1; w < a.bundle.outcomes(); ++w) {
        const int xz = a.bundle.measurementOf(z);
        const int xw = a.bundle.measurementOf(w);
        const double overlap =
            std::real((a.effects[z] * a.effects[w]).trace());
        if (xz == xw)
          CHECK(std::abs(overlap) <= 1e-10);  // same basis: orthogonal
        else
          CHECK(std::abs(overlap - 1.0 / q) <= 1e-10);  // unbiased
      }
  }
}

TEST_CASE("quantumNet lists all affine lines with their projections") {
  const FiniteField f = buildField(3);
  const QuantumNet net = quantumNet(f);
  REQUIRE(net.lines.size() == 12);  // d (d + 1) affine lines
  REQUIRE(net.projections.size() == net.lines.size());
  for (size_t i = 0; i < net.lines.size(); ++i) {
    CHECK(static_cast<int>(net.lines[i].points.size()) == 3);
    CHECK(isProjection(net.projections[i], 1e-9).isProjection);
  }
}

TEST_CASE("SL(2) group structure and phase-space action") {
  for (int q : {2, 3, 4, 5}) {
    const FiniteField f = buildField(q);
    const auto els = slElements(f);
    // |SL(2, F_q)| = q (q^2 - 1).
    CHECK(static_cast<int>(els.size()) == q * (q * q - 1));
    const SL2 id{};
    for (size_t i = 0; i < els.size(); i += 7) {
      const SL2 inv = slInv(f, els[i]);
      CHECK(slMul(f, els[i], inv) == id);
      // The linear action is a bijection fixing the origin.
      CHECK(slApply(f, els[i], 0) == 0);
      std::set<int> image;
      for (int u = 0; u < q * q; ++u) image.insert(slApply(f, els[i], u));
      CHECK(static_cast<int>(image.size()) == q * q);
    }
  }
}

TEST_CASE("metaplectic representation intertwines displacements") {
  for (int q : {3, 5}) {
    const FiniteField f = buildField(q);
    const auto disp = displacementTable(f);
    const auto els = slElements(f);
    for (size_t i = 0; i < els.size(); i += 5) {
      const CMat u = slRepresentation(f, els[i]);
      CHECK(maxAbs(u * u.adjoint() - CMat::Identity(q, q)) <= 1e-9);
      for (int v = 0; v < q * q; ++v) {
        const CMat lhs = u * disp[v] * u.adjoint();
        const CMat rhs = disp[slApply(f, els[i], v)];
        CHECK(maxAbs(lhs - rhs) <= 1e-8);
      }
    }
  }
}

TEST_CASE("mubSymmetryGroup has the full affine-symplectic order") {
  const FiniteField f3 = buildField(3);
  const MubSymmetry m3 = mubSymmetryGroup(f3);
  CHECK(m3.sym.group->order() == 216);  // |SL(2,3)| * 9
  CHECK_NOTHROW(checkSymmetry(m3.assemblage, m3.sym));
  CHECK(isUniform(m3.assemblage, m3.sym));
  CHECK(isRigid(m3.assemblage, m3.sym).rigid);
  // The recorded (F, v) parts compose with the phase-space action.
  const PermAction& phase = m3.phasePointAction;
  for (int g = 0; g < 216; g += 17) {
    const SL2 part = m3.slPart[g];
    const int v = m3.translationPart[g];
    const PhasePoint pv = pointFromIndex(f3, v);
    for (int u = 0; u < 9; ++u) {
      const int fu = slApply(f3, part, u);
      const PhasePoint pfu = pointFromIndex(f3, fu);
      const int expected = pointIndex(
          f3, {f3.add(pfu.u1, pv.u1), f3.add(pfu.u2, pv.u2)});
      CHECK(phase.apply(g, u) == expected);
    }
  }
}

TEST_CASE("mubSymmetryGroup order for d = 5") {
  const MubSymmetry m5 = mubSymmetryGroup(buildField(5));
  CHECK(m5.sym.group->order() == 3000);  // |SL(2,5)| * 25
  CHECK(isUniform(m5.assemblage, m5.sym));
  CHECK(isRigid(m5.assemblage, m5.sym).rigid);
}

TEST_CASE("wigner function: normalisation, covariance, reality") {
  for (int q : {3, 5}) {
    const FiniteField f = buildField(q);
    const auto disp = displacementTable(f);
    const CMat x = symtest::randomHermitian(q, 100 + q);
    const auto w = wignerFunction(f, x);
    REQUIRE(static_cast<int>(w.size()) == q * q);
    // Phase-space marginal: sum_u W_X(u) = Tr X.
    double total = 0.0;
    for (double v : w) total += v;
    CHECK(total == doctest::Approx(std::real(x.trace())).epsilon(1e-9));
    // The Wigner function of the identity is flat.
    const auto wid = wignerFunction(f, CMat::Identity(q, q));
    for (double v : wid) CHECK(v == doctest::Approx(1.0 / q).epsilon(1e-10));
    // Displacement covariance: W_{D_v X D_v^+}(u + v) = W_X(u).
    for (int v = 1; v < q * q; v += 3) {
      const auto wshift = wignerFunction(f, disp[v] * x * disp[v].adjoint());
      const PhasePoint pv = pointFromIndex(f, v);
      for (int u = 0; u < q * q; ++u) {
        const PhasePoint pu = pointFromIndex(f, u);
        const int shifted = pointIndex(
            f, {f.add(pu.u1, pv.u1), f.add(pu.u2, pv.u2)});
        CHECK(wshift[shifted] == doctest::Approx(w[u]).epsilon(1e-9));
      }
    }
    // Metaplectic covariance: W_{U_F X U_F^+}(F u) = W_X(u).
    const auto els = slElements(f);
    const SL2 m = els[els.size() / 2];
    const CMat u = slRepresentation(f, m);
    const auto wrot = wignerFunction(f, u * x * u.adjoint());
    for (int p = 0; p < q * q; ++p)
      CHECK(wrot[slApply(f, m, p)] == doctest::Approx(w[p]).epsilon(1e-9));
  }
}

TEST_CASE("wigner function reconstructs line probabilities") {
  // For a MUB effect (a line projection), summing W over the line's points
  // gives Tr(P Q) for the corresponding quantum-net projection; the flat
  // relation checked here is the trace pairing against the identity.
  const FiniteField f = buildField(3);
  const QuantumNet net = quantumNet(f);
  const CMat rho = symtest::randomHermitian(3, 77);
  const auto w = wignerFunction(f, rho);
  for (size_t i = 0; i < net.lines.size(); ++i) {
    double lineSum = 0.0;
    for (int u : net.lines[i].points) lineSum += w[u];
    const double expected = std::real((net.projections[i] * rho).trace());
    CHECK(lineSum == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("clifford stabiliser rigidity for one, two, three qubits") {
  for (int n = 1; n <= 3; ++n) {
    const auto gens = cliffordStabilizerGenerators(n);
    const int d = 1 << n;
    // n phase gates plus n(n-1) CNOTs.
    CHECK(static_cast<int>(gens.size()) == n + n * (n - 1));
    for (const auto& g : gens)
      CHECK(maxAbs(g * g.adjoint() - CMat::Identity(d, d)) <= 1e-12);
    const CliffordRigidity rig = cliffordStabilizerRigidity(n);
    CHECK(rig.rigid);
    CHECK(rig.commutantDim == 2);
    std::vector<int> sizes = rig.orbitSizes;
    std::sort(sizes.begin(), sizes.end());
    CHECK(sizes == std::vector<int>{1, d - 1});
  }
}
