#include "symmetra/mub.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

namespace symmetra {

namespace {

Complex rootOfUnity(int p, int exponent) {
  const double angle = 2.0 * std::numbers::pi * exponent / p;
  return {std::cos(angle), std::sin(angle)};
}

// omega^k with omega = e^{2 pi i / p}.
Complex omegaPow(const FiniteField& f, int k) { return rootOfUnity(f.p, k); }

// tau^k with tau = omega^{(p+1)/2} (odd p).
Complex tauPow(const FiniteField& f, int k) {
  return rootOfUnity(f.p, (k * ((f.p + 1) / 2)) % f.p);
}

void requireOdd(const FiniteField& f, const char* what) {
  if (f.p == 2) {
    throw EvenCharacteristic(std::string(what) +
                             " requires odd characteristic");
  }
}

}  // namespace

int symplecticForm(const FiniteField& f, int u, int v) {
  const int u1 = u / f.q, u2 = u % f.q;
  const int v1 = v / f.q, v2 = v % f.q;
  const int t = f.sub(f.mul(u2, v1), f.mul(u1, v2));
  return f.trace(t);
}

CMat displacement(const FiniteField& f, int u) {
  const int d = f.q;
  const int u1 = u / d, u2 = u % d;
  if (f.p % 2 == 1) {
    // X_a |x> = |x+a>, Z_b |x> = omega^{tr(bx)} |x>, D = tau^{tr(ab)} X_a Z_b.
    CMat m = CMat::Zero(d, d);
    const Complex front = tauPow(f, f.trace(f.mul(u1, u2)));
    for (int x = 0; x < d; ++x) {
      m(f.add(x, u1), x) = front * omegaPow(f, f.trace(f.mul(u2, x)));
    }
    return m;
  }
  // Even characteristic: qubit factors i^{q_r p_r} X^{q_r} Z^{p_r} with
  // q_r = tr(dual_r u1), p_r = tr(basis_r u2).
  CMat m = CMat::Identity(1, 1);
  const Complex iUnit(0.0, 1.0);
  for (int r = 0; r < f.n; ++r) {
    const int qr = f.trace(f.mul(u1, f.dualBasis[r]));
    const int pr = f.trace(f.mul(f.basis[r], u2));
    CMat factor = CMat::Identity(2, 2);
    if (qr) {
      CMat x(2, 2);
      x << 0, 1, 1, 0;
      factor = factor * x;
    }
    if (pr) {
      CMat z(2, 2);
      z << 1, 0, 0, -1;
      factor = factor * z;
    }
    factor *= std::pow(iUnit, qr * pr);
    CMat next(m.rows() * 2, m.cols() * 2);
    next.block(0, 0, m.rows(), m.cols()) = factor(0, 0) * m;
    next.block(0, m.cols(), m.rows(), m.cols()) = factor(0, 1) * m;
    next.block(m.rows(), 0, m.rows(), m.cols()) = factor(1, 0) * m;
    next.block(m.rows(), m.cols(), m.rows(), m.cols()) = factor(1, 1) * m;
    m = std::move(next);
  }
  return m;
}

std::vector<CMat> displacementTable(const FiniteField& f) {
  std::vector<CMat> out;
  out.reserve(static_cast<size_t>(f.q) * f.q);
  for (int u = 0; u < f.q * f.q; ++u) out.push_back(displacement(f, u));
  return out;
}

std::vector<std::vector<int>> rays(const FiniteField& f) {
  const int d = f.q;
  std::vector<std::vector<int>> out;
  std::vector<int> vertical(d);
  for (int t = 0; t < d; ++t) vertical[t] = t;  // (0, t)
  out.push_back(std::move(vertical));
  for (int m = 0; m < d; ++m) {
    std::vector<int> ray(d);
    for (int t = 0; t < d; ++t) ray[t] = t * d + f.mul(m, t);  // (t, m t)
    std::sort(ray.begin(), ray.end());
    out.push_back(std::move(ray));
  }
  return out;
}

std::vector<LineLabel> lineTable(const FiniteField& f) {
  const int d = f.q;
  const std::vector<std::vector<int>> allRays = rays(f);
  std::vector<LineLabel> out;
  out.reserve(static_cast<size_t>(d + 1) * d);
  for (int i = 0; i <= d; ++i) {
    // Identify the direction from any nonzero point of the ray.
    int w = 0;
    for (int u : allRays[i]) {
      if (u != 0) {
        w = u;
        break;
      }
    }
    const int w1 = w / d, w2 = w % d;
    for (int c = 0; c < d; ++c) {
      LineLabel l;
      l.ray = i;
      l.intercept = c;
      l.points.resize(d);
      if (w1 == 0) {
        // Vertical: line {(c, t)}, offset point (c, 0).
        l.offsetPoint = c * d;
        for (int t = 0; t < d; ++t) l.points[t] = c * d + t;
      } else {
        // Slope m = w2 / w1: line {(t, m t + c)}, offset point (0, c).
        const int m = f.mul(w2, f.inv(w1));
        l.offsetPoint = c;
        for (int t = 0; t < d; ++t) l.points[t] = t * d + f.add(f.mul(m, t), c);
      }
      std::sort(l.points.begin(), l.points.end());
      out.push_back(std::move(l));
    }
  }
  return out;
}

CMat lineProjection(const FiniteField& f, const std::vector<CMat>& disp,
                    int ray, int intercept) {
  requireOdd(f, "lineProjection");
  const int d = f.q;
  const std::vector<std::vector<int>> allRays = rays(f);
  const std::vector<LineLabel> lines = lineTable(f);
  const LineLabel& l = lines[ray * d + intercept];
  CMat q = CMat::Zero(d, d);
  for (int v : allRays[ray]) {
    q += omegaPow(f, symplecticForm(f, l.offsetPoint, v)) * disp[v];
  }
  return q / static_cast<double>(d);
}

Assemblage mubAssemblage(const FiniteField& f) {
  const int d = f.q;
  const std::vector<CMat> disp = displacementTable(f);
  const std::vector<std::vector<int>> allRays = rays(f);

  Assemblage a;
  a.dim = d;
  a.bundle = OutcomeBundle::fromFibreSizes(std::vector<int>(d + 1, d));

  if (f.p % 2 == 1) {
    for (int i = 0; i <= d; ++i) {
      for (int c = 0; c < d; ++c) {
        a.effects.push_back(lineProjection(f, disp, i, c));
      }
    }
  } else {
    // Even characteristic: per ray, diagonalise a seeded random Hermitian
    // combination of the (commuting) ray displacements; its eigenvectors are
    // the joint eigenbasis.  Outcomes are ordered by the descending
    // lexicographic tuple of displacement eigenvalues.
    std::mt19937 rng(12345);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int i = 0; i <= d; ++i) {
      std::vector<int> nz;
      for (int u : allRays[i]) {
        if (u != 0) nz.push_back(u);
      }
      bool done = false;
      for (int attempt = 0; attempt < 100 && !done; ++attempt) {
        CMat h = CMat::Zero(d, d);
        for (int u : nz) h += gauss(rng) * disp[u];
        const Spectrum s = hermitianSpectrum(hermitize(h));
        // Label each eigenvector by its displacement eigenvalue tuple.
        std::vector<std::pair<std::vector<int>, int>> labelled;
        bool valid = true;
        for (int k = 0; k < d && valid; ++k) {
          const CVec v = s.eigenvectors.col(k);
          std::vector<int> tuple;
          for (int u : nz) {
            const Complex ev = v.dot(disp[u] * v);
            const int rounded = static_cast<int>(std::lround(ev.real()));
            if (std::abs(ev.real() - rounded) > 1e-7 ||
                std::abs(ev.imag()) > 1e-7 || std::abs(rounded) != 1) {
              valid = false;
              break;
            }
            tuple.push_back(rounded);
          }
          labelled.push_back({std::move(tuple), k});
        }
        if (valid) {
          std::sort(labelled.begin(), labelled.end(),
                    [](const auto& x, const auto& y) { return x.first > y.first; });
          for (int k = 1; k < d; ++k) {
            if (labelled[k].first == labelled[k - 1].first) valid = false;
          }
        }
        if (!valid) continue;  // degenerate draw; try the next one
        for (const auto& [tuple, k] : labelled) {
          const CVec v = s.eigenvectors.col(k);
          a.effects.push_back(v * v.adjoint());
        }
        done = true;
      }
      if (!done) throw NoConvergence("joint eigenbasis construction failed");
    }
  }

  // Light self-check: projections and completeness.
  for (const CMat& e : a.effects) {
    if (!isProjection(e, 1e-8).isProjection) {
      throw InvariantViolation("MUB effect is not a projection");
    }
  }
  const NormalizationReport norm = checkNormalization(a);
  if (!norm.ok) throw InvariantViolation("MUB fibres do not sum to identity");
  return a;
}

QuantumNet quantumNet(const FiniteField& f) {
  requireOdd(f, "quantumNet");
  const std::vector<CMat> disp = displacementTable(f);
  QuantumNet net;
  net.lines = lineTable(f);
  net.projections.reserve(net.lines.size());
  for (const LineLabel& l : net.lines) {
    net.projections.push_back(lineProjection(f, disp, l.ray, l.intercept));
  }
  return net;
}

// ------------------------------------------------------------ SL(2, F_d)

std::vector<SL2> slElements(const FiniteField& f) {
  const int d = f.q;
  std::vector<SL2> out;
  out.reserve(static_cast<size_t>(d) * d * d);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      for (int c = 0; c < d; ++c) {
        for (int e = 0; e < d; ++e) {
          if (f.sub(f.mul(a, e), f.mul(b, c)) == 1) out.push_back({a, b, c, e});
        }
      }
    }
  }
  return out;
}

SL2 slMul(const FiniteField& f, const SL2& x, const SL2& y) {
  return {f.add(f.mul(x.a, y.a), f.mul(x.b, y.c)),
          f.add(f.mul(x.a, y.b), f.mul(x.b, y.d)),
          f.add(f.mul(x.c, y.a), f.mul(x.d, y.c)),
          f.add(f.mul(x.c, y.b), f.mul(x.d, y.d))};
}

SL2 slInv(const FiniteField& f, const SL2& x) {
  return {x.d, f.neg(x.b), f.neg(x.c), x.a};
}

int slApply(const FiniteField& f, const SL2& m, int u) {
  const int u1 = u / f.q, u2 = u % f.q;
  const int v1 = f.add(f.mul(m.a, u1), f.mul(m.b, u2));
  const int v2 = f.add(f.mul(m.c, u1), f.mul(m.d, u2));
  return v1 * f.q + v2;
}

CMat slRepresentation(const FiniteField& f, const SL2& m) {
  requireOdd(f, "slRepresentation");
  const int d = f.q;
  CMat u = CMat::Zero(d, d);
  if (m.b != 0) {
    const int binv = f.inv(m.b);
    for (int x = 0; x < d; ++x) {
      for (int y = 0; y < d; ++y) {
        // tr[(a y^2 - 2 x y + d x^2) / b]
        int t = f.mul(m.a, f.mul(y, y));
        const int xy = f.mul(x, y);
        t = f.sub(t, f.add(xy, xy));
        t = f.add(t, f.mul(m.d, f.mul(x, x)));
        t = f.mul(t, binv);
        u(x, y) = tauPow(f, f.trace(t));
      }
    }
    u /= std::sqrt(static_cast<double>(d));
  } else {
    // b = 0: U |x> = tau^{tr(a c x^2)} |a x>.
    for (int x = 0; x < d; ++x) {
      const int t = f.mul(m.a, f.mul(m.c, f.mul(x, x)));
      u(f.mul(m.a, x), x) = tauPow(f, f.trace(t));
    }
  }
  return u;
}

MubSymmetry mubSymmetryGroup(const FiniteField& f) {
  requireOdd(f, "mubSymmetryGroup");
  const int d = f.q;
  const std::vector<SL2> sl = slElements(f);
  const int nSl = static_cast<int>(sl.size());
  const long long order = static_cast<long long>(nSl) * d * d;
  if (order > 100000) {
    throw TooLarge("symmetry group order " + std::to_string(order) +
                   " exceeds the 1e5 element limit");
  }
  if (order > 20000) {
    throw TooLarge("symmetry group order " + std::to_string(order) +
                   " needs an impractically large multiplication table");
  }

  // Dense SL(2) index lookup.
  std::vector<int> slIndex(static_cast<size_t>(d) * d * d * d, -1);
  auto slKey = [d](const SL2& m) {
    return ((static_cast<size_t>(m.a) * d + m.b) * d + m.c) * d + m.d;
  };
  for (int i = 0; i < nSl; ++i) slIndex[slKey(sl[i])] = i;

  // Elements (F, v) in lexicographic (F index, v) order; product
  // (F, v)(F', v') = (F F', v + F v').
  const int n = static_cast<int>(order);
  const int dd = d * d;
  auto elem = [&](int i) { return std::pair<int, int>{i / dd, i % dd}; };
  auto indexOfPair = [&](int fi, int v) { return fi * dd + v; };

  auto addPoints = [&](int u, int v) {
    return f.add(u / d, v / d) * d + f.add(u % d, v % d);
  };

  std::vector<int32_t> mult(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    const auto [fi, vi] = elem(i);
    for (int j = 0; j < n; ++j) {
      const auto [fj, vj] = elem(j);
      const int fk = slIndex[slKey(slMul(f, sl[fi], sl[fj]))];
      const int vk = addPoints(vi, slApply(f, sl[fi], vj));
      mult[static_cast<size_t>(i) * n + j] = indexOfPair(fk, vk);
    }
  }

  // Unitaries D_v U_F.
  const std::vector<CMat> disp = displacementTable(f);
  std::vector<CMat> slUnis(nSl);
  for (int i = 0; i < nSl; ++i) slUnis[i] = slRepresentation(f, sl[i]);
  std::vector<CMat> unis(n);
  for (int i = 0; i < n; ++i) {
    const auto [fi, vi] = elem(i);
    unis[i] = disp[vi] * slUnis[fi];
  }

  // Generators: elementary matrices over the power basis plus the two basic
  // translations; these generate the full semidirect product.
  const int identitySl = slIndex[slKey({1, 0, 0, 1})];
  std::vector<int> gens;
  for (int r = 0; r < f.n; ++r) {
    const int b = f.basis[r];
    gens.push_back(indexOfPair(slIndex[slKey({1, b, 0, 1})], 0));
    gens.push_back(indexOfPair(slIndex[slKey({1, 0, b, 1})], 0));
    gens.push_back(indexOfPair(identitySl, b * d));  // v = (e_r, 0)
    gens.push_back(indexOfPair(identitySl, b));      // v = (0, e_r)
  }

  FiniteMatrixGroup group = makeGroupFromTable(std::move(unis), std::move(mult), gens);
  auto groupPtr = std::make_shared<const FiniteMatrixGroup>(std::move(group));

  // Assemblage and the affine action on its line outcomes.
  const Assemblage mub = mubAssemblage(f);
  const std::vector<LineLabel> lines = lineTable(f);
  std::map<std::vector<int>, int> lineLookup;
  for (size_t z = 0; z < lines.size(); ++z) {
    lineLookup.emplace(lines[z].points, static_cast<int>(z));
  }
  const int nOut = static_cast<int>(lines.size());
  std::vector<int32_t> outcomeImages(static_cast<size_t>(n) * nOut);
  std::vector<int32_t> pointImages(static_cast<size_t>(n) * dd);
  std::vector<int> moved(d);
  for (int i = 0; i < n; ++i) {
    const auto [fi, vi] = elem(i);
    for (int u = 0; u < dd; ++u) {
      pointImages[static_cast<size_t>(i) * dd + u] =
          addPoints(slApply(f, sl[fi], u), vi);
    }
    for (int z = 0; z < nOut; ++z) {
      for (int k = 0; k < d; ++k) {
        moved[k] = pointImages[static_cast<size_t>(i) * dd + lines[z].points[k]];
      }
      std::sort(moved.begin(), moved.end());
      const auto it = lineLookup.find(moved);
      if (it == lineLookup.end()) {
        throw Error("affine map did not permute the lines");
      }
      outcomeImages[static_cast<size_t>(i) * nOut + z] = it->second;
    }
  }

  MubSymmetry out;
  out.assemblage = mub;
  out.sym = makeSymmetryData(mub, groupPtr, std::move(outcomeImages));
  out.phasePointAction = makePermAction(groupPtr, std::move(pointImages), dd);
  out.slPart.reserve(n);
  out.translationPart.reserve(n);
  for (int i = 0; i < n; ++i) {
    const auto [fi, vi] = elem(i);
    out.slPart.push_back(sl[fi]);
    out.translationPart.push_back(vi);
  }
  return out;
}

std::vector<double> wignerFunction(const FiniteField& f, const CMat& x) {
  const int d = f.q;
  if (x.rows() != d || x.cols() != d) {
    throw Error("wignerFunction: operator dimension mismatch");
  }
  if (hermiticityDefect(x) > 1e-8) {
    throw NotHermitian("wignerFunction expects a Hermitian operator");
  }
  const std::vector<CMat> disp = displacementTable(f);
  const int dd = d * d;
  std::vector<Complex> coeff(dd);
  for (int v = 0; v < dd; ++v) coeff[v] = (disp[v].adjoint() * x).trace();
  std::vector<double> w(dd);
  for (int u = 0; u < dd; ++u) {
    Complex acc = 0.0;
    for (int v = 0; v < dd; ++v) {
      acc += omegaPow(f, symplecticForm(f, u, v)) * coeff[v];
    }
    acc /= static_cast<double>(dd);
    if (std::abs(acc.imag()) > 1e-8) {
      throw InvariantViolation("Wigner function came out complex");
    }
    w[u] = acc.real();
  }
  return w;
}

// ------------------------------------------------- Clifford stabiliser

std::vector<CMat> cliffordStabilizerGenerators(int nQubits) {
  if (nQubits < 1 || nQubits > 3) {
    throw TooLarge("cliffordStabilizerGenerators supports 1..3 qubits");
  }
  const int n = nQubits;
  const int d = 1 << n;
  std::vector<CMat> gens;

  for (int j = 0; j < n; ++j) {
    CMat p = CMat::Zero(d, d);
    for (int x = 0; x < d; ++x) {
      const int bit = (x >> (n - 1 - j)) & 1;
      p(x, x) = bit ? Complex(0.0, 1.0) : Complex(1.0, 0.0);
    }
    gens.push_back(std::move(p));
  }
  for (int jc = 0; jc < n; ++jc) {
    for (int jt = 0; jt < n; ++jt) {
      if (jc == jt) continue;
      CMat cx = CMat::Zero(d, d);
      for (int x = 0; x < d; ++x) {
        int y = x;
        if ((x >> (n - 1 - jc)) & 1) y ^= 1 << (n - 1 - jt);
        cx(y, x) = 1.0;
      }
      gens.push_back(std::move(cx));
    }
  }
  return gens;
}

CliffordRigidity cliffordStabilizerRigidity(int nQubits) {
  if (nQubits < 1 || nQubits > 3) {
    throw TooLarge("cliffordStabilizerRigidity supports 1..3 qubits");
  }
  const int n = nQubits;
  const int d = 1 << n;

  // Stage 1: the diagonal phase tuples (i^{bit_j(x)})_j separate all basis
  // states, so anything commuting with every P_j is diagonal.  This is a
  // property of the bit patterns themselves.
  for (int x = 0; x < d; ++x) {
    for (int y = x + 1; y < d; ++y) {
      if (x == y) continue;
      bool separated = false;
      for (int j = 0; j < n && !separated; ++j) {
        separated = ((x >> j) & 1) != ((y >> j) & 1);
      }
      if (!separated) throw Error("phase gates fail to separate basis states");
    }
  }

  // Stage 2: a diagonal operator commuting with the CNOT permutations must
  // be constant on the orbits of the linear maps x -> x ^ (bit_jc(x) << jt)
  // acting on F_2^n.
  std::vector<int> orbitOf(d, -1);
  CliffordRigidity out;
  for (int x0 = 0; x0 < d; ++x0) {
    if (orbitOf[x0] >= 0) continue;
    const int id = static_cast<int>(out.orbitSizes.size());
    std::vector<int> stack{x0};
    orbitOf[x0] = id;
    int size = 0;
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      ++size;
      for (int jc = 0; jc < n; ++jc) {
        for (int jt = 0; jt < n; ++jt) {
          if (jc == jt) continue;
          int y = x;
          if ((x >> (n - 1 - jc)) & 1) y ^= 1 << (n - 1 - jt);
          if (orbitOf[y] < 0) {
            orbitOf[y] = id;
            stack.push_back(y);
          }
        }
      }
    }
    out.orbitSizes.push_back(size);
  }
  out.commutantDim = static_cast<int>(out.orbitSizes.size());
  out.rigid = out.commutantDim == 2;
  return out;
}

}  // namespace symmetra
