#include "symmetra/bundle.hpp"

#include <algorithm>
#include <cmath>

namespace symmetra {

int OutcomeBundle::measurementOf(int z) const {
  // fibreOffsets is sorted; find the fibre containing z.
  const auto it = std::upper_bound(fibreOffsets.begin(), fibreOffsets.end(), z);
  return static_cast<int>(it - fibreOffsets.begin()) - 1;
}

uint64_t OutcomeBundle::sectionCount() const {
  uint64_t n = 1;
  for (int s : fibreSizes) {
    if (n > (uint64_t{1} << 63) / static_cast<uint64_t>(s)) {
      return uint64_t{1} << 63;  // saturate; callers only compare against caps
    }
    n *= static_cast<uint64_t>(s);
  }
  return n;
}

OutcomeBundle OutcomeBundle::fromFibreSizes(std::vector<int> sizes) {
  if (sizes.empty()) throw Error("bundle needs at least one measurement");
  OutcomeBundle b;
  b.fibreOffsets.assign(1, 0);
  for (int s : sizes) {
    if (s < 1) throw Error("fibre sizes must be positive");
    b.fibreOffsets.push_back(b.fibreOffsets.back() + s);
  }
  b.fibreSizes = std::move(sizes);
  return b;
}

NormalizationReport checkNormalization(const Assemblage& a, double tol) {
  NormalizationReport rep;
  rep.worstEffectMinEig = 0.0;
  if (a.effects.size() != static_cast<size_t>(a.bundle.outcomes())) {
    throw Error("effect count does not match the bundle");
  }
  bool first = true;
  for (const CMat& e : a.effects) {
    if (e.rows() != a.dim || e.cols() != a.dim) {
      throw Error("effect dimension mismatch");
    }
    rep.worstHermDefect = std::max(rep.worstHermDefect, hermiticityDefect(e));
    const double lo = minEig(e, std::max(tol, 1e-7));
    if (first || lo < rep.worstEffectMinEig) rep.worstEffectMinEig = lo;
    first = false;
  }
  const CMat id = identity(a.dim);
  for (int x = 0; x < a.bundle.measurements(); ++x) {
    CMat sum = CMat::Zero(a.dim, a.dim);
    for (int o = 0; o < a.bundle.fibreSizes[x]; ++o) {
      sum += a.effect(a.bundle.globalIndex(x, o));
    }
    rep.worstFibreDefect = std::max(rep.worstFibreDefect, maxAbs(sum - id));
  }
  rep.ok = rep.worstFibreDefect <= std::max(tol, 1e-8) &&
           rep.worstEffectMinEig >= -std::max(tol, 1e-8) &&
           rep.worstHermDefect <= std::max(tol, 1e-8);
  return rep;
}

PermAction checkCovariance(const Assemblage& a, const GroupPtr& group,
                           const PermAction& outcomeAction, double tol) {
  if (!group) throw Error("checkCovariance needs a group");
  if (outcomeAction.points != a.bundle.outcomes()) {
    throw NotSymmetric("outcome action has the wrong number of points");
  }
  if (group->dim != a.dim) {
    throw NotSymmetric("group dimension does not match the assemblage");
  }
  const int n = group->order();
  const int m = a.bundle.measurements();

  // Fibres must map to fibres; derive the measurement action.
  std::vector<int32_t> measImages(static_cast<size_t>(n) * m);
  for (int g = 0; g < n; ++g) {
    for (int x = 0; x < m; ++x) {
      const int z0 = a.bundle.globalIndex(x, 0);
      const int xTo = a.bundle.measurementOf(outcomeAction.apply(g, z0));
      if (a.bundle.fibreSizes[xTo] != a.bundle.fibreSizes[x]) {
        throw NotSymmetric("outcome action maps a fibre onto a fibre of different size");
      }
      for (int o = 1; o < a.bundle.fibreSizes[x]; ++o) {
        const int z = a.bundle.globalIndex(x, o);
        if (a.bundle.measurementOf(outcomeAction.apply(g, z)) != xTo) {
          throw NotSymmetric("outcome action splits a fibre");
        }
      }
      measImages[static_cast<size_t>(g) * m + x] = xTo;
    }
  }

  // Covariance on generators extends to the whole group by composition.
  std::vector<int> gens = group->generatorIndices;
  if (gens.empty()) {
    gens.resize(n);
    for (int g = 0; g < n; ++g) gens[g] = g;
  }
  for (int g : gens) {
    const CMat& u = group->elements[g];
    for (int z = 0; z < a.bundle.outcomes(); ++z) {
      const CMat moved = u * a.effect(z) * u.adjoint();
      if (!approxEqual(moved, a.effect(outcomeAction.apply(g, z)), tol)) {
        throw NotSymmetric("covariance fails for a generator");
      }
    }
  }
  return makePermAction(group, std::move(measImages), m);
}

SymmetryData makeSymmetryData(const Assemblage& a, GroupPtr group,
                              std::vector<int32_t> outcomeImages, double tol) {
  SymmetryData s;
  s.outcomeAction = makePermAction(group, std::move(outcomeImages),
                                   a.bundle.outcomes());
  s.measurementAction = checkCovariance(a, group, s.outcomeAction, tol);
  s.group = std::move(group);
  return s;
}

void checkSymmetry(const Assemblage& a, const SymmetryData& s, double tol) {
  const NormalizationReport norm = checkNormalization(a, tol);
  if (!norm.ok) {
    throw InvariantViolation("assemblage is not normalized (fibre defect " +
                             std::to_string(norm.worstFibreDefect) + ")");
  }
  const PermAction induced = checkCovariance(a, s.group, s.outcomeAction, tol);
  if (induced.images != s.measurementAction.images) {
    throw NotSymmetric("stored measurement action does not match the induced one");
  }
}

bool isUniform(const Assemblage& a, const SymmetryData& s) {
  (void)a;
  return orbits(s.outcomeAction).size() == 1;
}

RigidityReport isRigid(const Assemblage& a, const SymmetryData& s, double tol) {
  RigidityReport rep;
  rep.rigid = true;
  const OutcomeOrbitData orb = orbitRepresentatives(a, s);
  for (size_t i = 0; i < orb.representatives.size(); ++i) {
    const int z = orb.representatives[i];
    rep.representatives.push_back(z);

    const std::vector<int> stab = stabilizer(s.outcomeAction, z);
    std::vector<CMat> unitaries;
    unitaries.reserve(stab.size());
    for (int h : stab) unitaries.push_back(s.group->elements[h]);
    const std::vector<CMat> basis = commutantBasis(unitaries, a.dim);
    rep.commutantDims.push_back(static_cast<int>(basis.size()));

    int charNorm = -1;
    if (!s.group->projective) charNorm = countIrreducibleSubreps(*s.group, stab);
    rep.charNorms.push_back(charNorm);

    // Effect must be a scaled projection: A^2 = c A with c its top eigenvalue.
    const CMat& e = a.effect(z);
    const double c = maxEig(e);
    const double projDefect = maxAbs(e * e - c * e);
    rep.worstProjectionDefect = std::max(rep.worstProjectionDefect, projDefect);

    // Distance of every commutant basis element from span{1, A_z}.
    const CMat id = identity(a.dim);
    const CMat central = e - (e.trace() / static_cast<double>(a.dim)) * id;
    const double centralNorm = central.norm();
    double spanDefect = 0.0;
    if (centralNorm > tol) {
      const CMat q1 = id / id.norm();
      const CMat q2 = central / centralNorm;
      for (const CMat& b : basis) {
        const Complex c1 = q1.conjugate().cwiseProduct(b).sum();
        const Complex c2 = q2.conjugate().cwiseProduct(b).sum();
        const CMat resid = b - c1 * q1 - c2 * q2;
        spanDefect = std::max(spanDefect, resid.norm());
      }
    } else {
      spanDefect = 1.0;  // central effect: cannot span a 2-dim commutant
    }
    rep.worstSpanDefect = std::max(rep.worstSpanDefect, spanDefect);

    const bool orbitRigid = basis.size() == 2 && centralNorm > tol &&
                            spanDefect <= tol && projDefect <= tol;
    rep.rigid = rep.rigid && orbitRigid;
  }
  return rep;
}

// ---------------------------------------------------------------- sections

SectionIterator::SectionIterator(const OutcomeBundle& b, uint64_t first,
                                 uint64_t last)
    : bundle_(&b), next_(first), last_(std::min(last, b.sectionCount())) {}

SectionIterator::SectionIterator(const OutcomeBundle& b)
    : SectionIterator(b, 0, b.sectionCount()) {}

bool SectionIterator::next(Section& out) {
  if (next_ >= last_) return false;
  out = sectionFromIndex(*bundle_, next_);
  ++next_;
  return true;
}

std::vector<Section> enumerateSections(const OutcomeBundle& b, uint64_t cap) {
  const uint64_t n = b.sectionCount();
  if (n > cap) {
    throw TooManySections(std::to_string(n) + " sections exceed cap " +
                          std::to_string(cap));
  }
  std::vector<Section> out;
  out.reserve(n);
  SectionIterator it(b);
  Section s;
  while (it.next(s)) out.push_back(s);
  return out;
}

Section sectionFromIndex(const OutcomeBundle& b, uint64_t index) {
  const int m = b.measurements();
  Section s;
  s.outcomes.resize(m);
  // Lexicographic: measurement 0 is the most significant digit.
  for (int x = m - 1; x >= 0; --x) {
    const uint64_t size = static_cast<uint64_t>(b.fibreSizes[x]);
    s.outcomes[x] = b.globalIndex(x, static_cast<int>(index % size));
    index /= size;
  }
  return s;
}

uint64_t indexOfSection(const OutcomeBundle& b, const Section& s) {
  uint64_t idx = 0;
  for (int x = 0; x < b.measurements(); ++x) {
    idx = idx * static_cast<uint64_t>(b.fibreSizes[x]) +
          static_cast<uint64_t>(b.localIndex(s.outcomes[x]));
  }
  return idx;
}

Section sectionAction(const SymmetryData& s, int g, const Section& sec) {
  const int m = s.measurementAction.points;
  const int gInv = s.group->inv(g);
  Section out;
  out.outcomes.resize(m);
  for (int x = 0; x < m; ++x) {
    const int xFrom = s.measurementAction.apply(gInv, x);
    out.outcomes[x] = s.outcomeAction.apply(g, sec.outcomes[xFrom]);
  }
  return out;
}

uint64_t sectionIndexAction(const OutcomeBundle& b, const SymmetryData& s,
                            int g, uint64_t index) {
  return indexOfSection(b, sectionAction(s, g, sectionFromIndex(b, index)));
}

OutcomeOrbitData orbitRepresentatives(const Assemblage& a,
                                      const SymmetryData& s) {
  OutcomeOrbitData out;
  out.orbitOf.assign(a.bundle.outcomes(), -1);
  const std::vector<std::vector<int>> all = orbits(s.outcomeAction);
  for (size_t i = 0; i < all.size(); ++i) {
    out.representatives.push_back(all[i].front());
    out.orbitSizes.push_back(static_cast<int>(all[i].size()));
    for (int z : all[i]) out.orbitOf[z] = static_cast<int>(i);
  }
  return out;
}

SectionSymmetry sectionSymmetryFrom(const SymmetryData& s) {
  SectionSymmetry gens;
  std::vector<int> idx = s.group->generatorIndices;
  if (idx.empty()) {
    idx.resize(s.group->order());
    for (int g = 0; g < s.group->order(); ++g) idx[g] = g;
  }
  for (int g : idx) {
    std::vector<int32_t> op(s.outcomeAction.points);
    for (int z = 0; z < s.outcomeAction.points; ++z) {
      op[z] = s.outcomeAction.apply(g, z);
    }
    std::vector<int32_t> mp(s.measurementAction.points);
    for (int x = 0; x < s.measurementAction.points; ++x) {
      mp[x] = s.measurementAction.apply(g, x);
    }
    gens.outcomePerms.push_back(std::move(op));
    gens.measurementPerms.push_back(std::move(mp));
  }
  return gens;
}

SectionOrbitData orbitRepresentatives(const OutcomeBundle& b,
                                      const SectionSymmetry& gens,
                                      uint64_t cap) {
  const uint64_t n = b.sectionCount();
  if (n > cap) {
    throw TooManySections(std::to_string(n) +
                          " sections exceed the orbit enumeration cap");
  }
  const int m = b.measurements();
  const size_t nGens = gens.outcomePerms.size();

  // Apply one generating permutation to a section given as local digits.
  std::vector<int> digits(m), moved(m);
  auto applyGen = [&](size_t gi, const std::vector<int>& in, std::vector<int>& out) {
    const auto& op = gens.outcomePerms[gi];
    const auto& mp = gens.measurementPerms[gi];
    for (int x = 0; x < m; ++x) {
      const int z = b.globalIndex(x, in[x]);
      const int zTo = op[z];
      out[mp[x]] = b.localIndex(zTo);
    }
  };

  SectionOrbitData out;
  out.totalSections = n;
  std::vector<bool> seen(n, false);
  std::vector<uint64_t> stack;
  for (uint64_t s0 = 0; s0 < n; ++s0) {
    if (seen[s0]) continue;
    seen[s0] = true;
    stack.assign(1, s0);
    uint64_t size = 0;
    while (!stack.empty()) {
      const uint64_t cur = stack.back();
      stack.pop_back();
      ++size;
      // Decode to local digits once, then push all generator images.
      uint64_t rem = cur;
      for (int x = m - 1; x >= 0; --x) {
        digits[x] = static_cast<int>(rem % static_cast<uint64_t>(b.fibreSizes[x]));
        rem /= static_cast<uint64_t>(b.fibreSizes[x]);
      }
      for (size_t gi = 0; gi < nGens; ++gi) {
        applyGen(gi, digits, moved);
        uint64_t idx = 0;
        for (int x = 0; x < m; ++x) {
          idx = idx * static_cast<uint64_t>(b.fibreSizes[x]) +
                static_cast<uint64_t>(moved[x]);
        }
        if (!seen[idx]) {
          seen[idx] = true;
          stack.push_back(idx);
        }
      }
    }
    out.representatives.push_back(s0);
    out.orbitSizes.push_back(size);
  }
  return out;
}

}  // namespace symmetra
