#include "symmetra/construct.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "symmetra/errors.hpp"
#include "symmetra/io.hpp"

namespace symmetra {

namespace {

int roundedRank(const CMat& p) {
  return static_cast<int>(std::lround(p.trace().real()));
}

// Approximate equality of assemblages as unordered collections of
// measurements, each an unordered collection of effects.
bool sameFibre(const Assemblage& x, int fx, const Assemblage& y, int fy,
               double tol) {
  const int size = x.bundle.fibreSizes[fx];
  if (y.bundle.fibreSizes[fy] != size) return false;
  std::vector<char> taken(size, 0);
  for (int i = 0; i < size; ++i) {
    const CMat& e = x.effect(x.bundle.globalIndex(fx, i));
    bool found = false;
    for (int j = 0; j < size; ++j) {
      if (taken[j]) continue;
      if (maxAbs(e - y.effect(y.bundle.globalIndex(fy, j))) <= tol) {
        taken[j] = 1;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

bool sameAssemblage(const Assemblage& x, const Assemblage& y, double tol) {
  if (x.dim != y.dim) return false;
  if (x.bundle.measurements() != y.bundle.measurements()) return false;
  const int m = x.bundle.measurements();
  std::vector<char> taken(m, 0);
  for (int fx = 0; fx < m; ++fx) {
    bool found = false;
    for (int fy = 0; fy < m; ++fy) {
      if (taken[fy]) continue;
      if (sameFibre(x, fx, y, fy, tol)) {
        taken[fy] = 1;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

// Ordering-insensitive fingerprint: quantized effect keys sorted within each
// fibre, fibre strings sorted across the assemblage.
std::string canonicalKey(const Assemblage& a) {
  std::vector<std::string> fibres;
  for (int x = 0; x < a.bundle.measurements(); ++x) {
    std::vector<std::string> keys;
    for (int i = 0; i < a.bundle.fibreSizes[x]; ++i)
      keys.push_back(quantizedKey(a.effect(a.bundle.globalIndex(x, i))));
    std::sort(keys.begin(), keys.end());
    std::string fibre;
    for (const auto& k : keys) fibre += k + "|";
    fibres.push_back(std::move(fibre));
  }
  std::sort(fibres.begin(), fibres.end());
  std::string key;
  for (const auto& f : fibres) key += f + "#";
  return key;
}

struct UnionFind {
  std::vector<int> up;
  explicit UnionFind(int n) : up(n) { std::iota(up.begin(), up.end(), 0); }
  int find(int x) {
    while (up[x] != x) x = up[x] = up[up[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    up[b] = a;
    return true;
  }
};

std::vector<int> renumberByFirstOccurrence(const std::vector<int>& raw) {
  std::vector<int> label(raw.size(), -1);
  std::vector<int> out(raw.size());
  int next = 0;
  for (size_t i = 0; i < raw.size(); ++i) {
    if (label[raw[i]] < 0) label[raw[i]] = next++;
    out[i] = label[raw[i]];
  }
  return out;
}

// Finest congruence of the action merging points a and b: propagate merged
// pairs through the generators until stable.
std::vector<int> minimalSystem(const std::vector<std::vector<int32_t>>& gens,
                               int n, int a, int b) {
  UnionFind uf(n);
  std::queue<std::pair<int, int>> pending;
  uf.unite(a, b);
  pending.emplace(a, b);
  while (!pending.empty()) {
    auto [x, y] = pending.front();
    pending.pop();
    for (const auto& gen : gens) {
      int xi = gen[x];
      int yi = gen[y];
      if (uf.unite(xi, yi)) pending.emplace(xi, yi);
    }
  }
  std::vector<int> raw(n);
  for (int i = 0; i < n; ++i) raw[i] = uf.find(i);
  return renumberByFirstOccurrence(raw);
}

}  // namespace

std::string GroupingMode::label() const {
  if (projective) return "projective";
  return "povm(" + std::to_string(povmSize) + ")";
}

std::vector<SubgroupClass> candidateStabilizers(const FiniteMatrixGroup& g,
                                                int orderCap) {
  auto classes = enumerateSubgroupClasses(g, orderCap);
  std::vector<SubgroupClass> out;
  for (const auto& cls : classes) {
    if (cls.order <= 1 || cls.order >= g.order()) continue;
    int pieces = 0;
    try {
      pieces = countIrreducibleSubreps(g, cls.representative);
    } catch (const ProjectivePhases&) {
      std::vector<CMat> us;
      us.reserve(cls.representative.size());
      for (int idx : cls.representative) us.push_back(g.elements[idx]);
      pieces = static_cast<int>(commutantBasis(us, g.dim).size());
    }
    if (pieces == 2) out.push_back(cls);
  }
  return out;
}

std::pair<CMat, CMat> isotypicProjection(const FiniteMatrixGroup& g,
                                         const std::vector<int>& subgroup) {
  std::vector<CMat> us;
  us.reserve(subgroup.size());
  for (int idx : subgroup) us.push_back(g.elements.at(idx));
  auto basis = commutantBasis(us, g.dim);
  if (basis.size() != 2)
    throw InvariantViolation("subgroup commutant has dimension " +
                             std::to_string(basis.size()) + ", expected 2");
  std::mt19937 rng(99);
  std::normal_distribution<double> normal;
  CMat mix = CMat::Zero(g.dim, g.dim);
  for (const auto& b : basis) mix += normal(rng) * b;
  mix = hermitize(mix);
  Spectrum spec = hermitianSpectrum(mix);
  int cut = 0;
  double best = -1.0;
  for (int i = 0; i + 1 < g.dim; ++i) {
    double gap = spec.eigenvalues[i + 1] - spec.eigenvalues[i];
    if (gap > best) {
      best = gap;
      cut = i;
    }
  }
  CMat p = CMat::Zero(g.dim, g.dim);
  for (int i = 0; i <= cut; ++i)
    p += spec.eigenvectors.col(i) * spec.eigenvectors.col(i).adjoint();
  p = hermitize(p);
  if (!isProjection(p, 1e-8).isProjection)
    throw NoConvergence("isotypic split did not produce a projection");
  return {p, identity(g.dim) - p};
}

ProjectionOrbit orbitOfProjection(const FiniteMatrixGroup& g, const CMat& p,
                                  double tol) {
  auto check = isProjection(p, 1e-7);
  if (!check.isProjection)
    throw InvariantViolation("orbit seed is not a projection (defect " +
                             std::to_string(check.defect) + ")");
  ProjectionOrbit orbit;
  orbit.elements.push_back(hermitize(p));
  auto findIndex = [&](const CMat& q) -> int {
    for (size_t i = 0; i < orbit.elements.size(); ++i)
      if (maxAbs(q - orbit.elements[i]) <= tol) return static_cast<int>(i);
    return -1;
  };
  const int n = g.order();
  std::vector<int32_t> seedImage(n);
  std::vector<int> transversal{g.identityIndex};
  for (int gi = 0; gi < n; ++gi) {
    CMat q = hermitize(g.elements[gi] * orbit.elements[0] *
                       g.elements[gi].adjoint());
    int idx = findIndex(q);
    if (idx < 0) {
      orbit.elements.push_back(std::move(q));
      idx = static_cast<int>(orbit.elements.size()) - 1;
      transversal.push_back(gi);
    }
    seedImage[gi] = idx;
    if (idx == 0) orbit.stabilizer.push_back(gi);
  }
  const size_t points = orbit.elements.size();
  if (points * orbit.stabilizer.size() != static_cast<size_t>(n))
    throw InvariantViolation(
        "orbit size times stabiliser order does not equal the group order");
  // The action on the whole orbit follows from the seed images through the
  // multiplication table: g . (t_i p t_i^dagger) = (g t_i) p (g t_i)^dagger.
  orbit.actionImages.assign(n, std::vector<int32_t>(points));
  for (int gi = 0; gi < n; ++gi)
    for (size_t i = 0; i < points; ++i)
      orbit.actionImages[gi][i] = seedImage[g.mult(gi, transversal[i])];
  return orbit;
}

Grouping groupIntoMeasurements(const std::vector<CMat>& orbit,
                               const GroupingMode& mode, double tol) {
  if (orbit.empty()) throw NoPartition("empty orbit");
  const int d = static_cast<int>(orbit[0].rows());
  const int rank = roundedRank(orbit[0]);
  int blockSize = 0;
  double target = 0.0;
  if (mode.projective) {
    if (rank <= 0 || d % rank != 0)
      throw NoPartition("projection rank does not divide the dimension");
    blockSize = d / rank;
    target = 1.0;
  } else {
    if (mode.povmSize <= 0) throw NoPartition("povm block size must be positive");
    blockSize = mode.povmSize;
    target = static_cast<double>(blockSize) * rank / d;
  }
  const int points = static_cast<int>(orbit.size());
  if (points % blockSize != 0)
    throw NoPartition("orbit size is not divisible by the block size");
  CMat eye = identity(d);
  std::vector<char> used(points, 0);
  std::vector<std::vector<int>> blocks;
  std::function<bool()> cover = [&]() -> bool {
    int seed = -1;
    for (int i = 0; i < points; ++i)
      if (!used[i]) {
        seed = i;
        break;
      }
    if (seed < 0) return true;
    std::vector<int> block{seed};
    used[seed] = 1;
    CMat sum = orbit[seed];
    std::function<bool(int)> grow = [&](int last) -> bool {
      if (static_cast<int>(block.size()) == blockSize) {
        if (maxAbs(sum - target * eye) > tol) return false;
        blocks.push_back(block);
        if (cover()) return true;
        blocks.pop_back();
        return false;
      }
      for (int c = last + 1; c < points; ++c) {
        if (used[c]) continue;
        CMat next = sum + orbit[c];
        if (maxEig(next) > target + tol) continue;
        used[c] = 1;
        block.push_back(c);
        CMat saved = std::move(sum);
        sum = std::move(next);
        if (grow(c)) return true;
        sum = std::move(saved);
        block.pop_back();
        used[c] = 0;
      }
      return false;
    };
    bool ok = grow(seed);
    if (!ok) used[seed] = 0;
    return ok;
  };
  if (!cover())
    throw NoPartition("no grouping of the orbit into " +
                      std::to_string(points / blockSize) + " blocks of " +
                      std::to_string(blockSize));
  Grouping out;
  out.blocks = blocks;
  out.bundle = OutcomeBundle::fromFibreSizes(
      std::vector<int>(points / blockSize, blockSize));
  const double scale =
      mode.projective ? 1.0
                      : static_cast<double>(d) / (mode.povmSize * rank);
  out.effects.reserve(points);
  for (const auto& block : blocks)
    for (int idx : block) out.effects.push_back(scale * orbit[idx]);
  return out;
}

bool verifyCovarianceOfGrouping(const std::vector<std::vector<int>>& blocks,
                                const ProjectionOrbit& orbit) {
  const int points = static_cast<int>(orbit.elements.size());
  std::vector<int> blockOf(points, -1);
  int covered = 0;
  for (size_t b = 0; b < blocks.size(); ++b)
    for (int x : blocks[b]) {
      if (x < 0 || x >= points || blockOf[x] >= 0) return false;
      blockOf[x] = static_cast<int>(b);
      ++covered;
    }
  if (covered != points) return false;
  for (const auto& row : orbit.actionImages)
    for (const auto& block : blocks) {
      int target = blockOf[row[block[0]]];
      for (int x : block)
        if (blockOf[row[x]] != target) return false;
    }
  return true;
}

std::vector<std::vector<std::vector<int>>> covariantGroupings(
    const FiniteMatrixGroup& g, const ProjectionOrbit& orbit) {
  const int points = static_cast<int>(orbit.elements.size());
  std::vector<std::vector<int32_t>> gens;
  std::vector<int> genIdx = g.generatorIndices;
  if (genIdx.empty())
    for (int i = 0; i < g.order(); ++i) genIdx.push_back(i);
  for (int gi : genIdx) gens.push_back(orbit.actionImages.at(gi));

  std::vector<std::vector<int>> systems;
  std::set<std::vector<int>> seen;
  std::vector<int> discrete(points);
  std::iota(discrete.begin(), discrete.end(), 0);
  seen.insert(discrete);
  systems.push_back(discrete);
  std::queue<std::vector<int>> frontier;
  frontier.push(discrete);
  while (!frontier.empty()) {
    std::vector<int> part = std::move(frontier.front());
    frontier.pop();
    int numBlocks = 1 + *std::max_element(part.begin(), part.end());
    if (numBlocks == 1) continue;
    std::vector<int> repPoint(numBlocks, -1);
    for (int x = 0; x < points; ++x)
      if (repPoint[part[x]] < 0) repPoint[part[x]] = x;
    std::vector<std::vector<int32_t>> qgens;
    for (const auto& gen : gens) {
      std::vector<int32_t> qgen(numBlocks);
      for (int b = 0; b < numBlocks; ++b) qgen[b] = part[gen[repPoint[b]]];
      qgens.push_back(std::move(qgen));
    }
    // By transitivity every covering congruence is the lift of a minimal
    // quotient system merging block 0 with some other block.
    for (int b = 1; b < numBlocks; ++b) {
      auto sigma = minimalSystem(qgens, numBlocks, 0, b);
      std::vector<int> lifted(points);
      for (int x = 0; x < points; ++x) lifted[x] = sigma[part[x]];
      lifted = renumberByFirstOccurrence(lifted);
      if (seen.insert(lifted).second) {
        systems.push_back(lifted);
        frontier.push(lifted);
      }
    }
  }

  std::vector<std::vector<std::vector<int>>> out;
  for (const auto& part : systems) {
    int numBlocks = 1 + *std::max_element(part.begin(), part.end());
    std::vector<std::vector<int>> blocks(numBlocks);
    for (int x = 0; x < points; ++x) blocks[part[x]].push_back(x);
    out.push_back(std::move(blocks));
  }
  return out;
}

void assemblagesFromOrbit(const GroupPtr& g, const ProjectionOrbit& orbit,
                          const GroupingMode& mode, ConstructionResult& out) {
  const int d = g->dim;
  const int points = static_cast<int>(orbit.elements.size());
  const int rank = roundedRank(orbit.elements[0]);
  if (rank <= 0 || rank >= d) return;
  int blockSize = 0;
  double target = 0.0;
  double scale = 1.0;
  if (mode.projective) {
    if (d % rank != 0) return;
    blockSize = d / rank;
    target = 1.0;
  } else {
    if (mode.povmSize <= 0) return;
    blockSize = mode.povmSize;
    target = static_cast<double>(blockSize) * rank / d;
    scale = static_cast<double>(d) / (blockSize * rank);
  }
  if (points % blockSize != 0) return;
  const std::string where =
      mode.label() + " grouping of a " + std::to_string(points) +
      "-element rank-" + std::to_string(rank) + " orbit";
  CMat eye = identity(d);
  auto systems = covariantGroupings(*g, orbit);
  for (const auto& blocks : systems) {
    bool rightShape = true;
    for (const auto& block : blocks)
      if (static_cast<int>(block.size()) != blockSize) {
        rightShape = false;
        break;
      }
    if (!rightShape) continue;
    bool sumsOk = true;
    for (const auto& block : blocks) {
      CMat sum = CMat::Zero(d, d);
      for (int idx : block) sum += orbit.elements[idx];
      if (maxAbs(sum - target * eye) > 1e-7) {
        sumsOk = false;
        break;
      }
    }
    if (!sumsOk) continue;
    if (!verifyCovarianceOfGrouping(blocks, orbit)) continue;

    Assemblage a;
    a.dim = d;
    a.bundle = OutcomeBundle::fromFibreSizes(
        std::vector<int>(blocks.size(), blockSize));
    a.effects.reserve(points);
    std::vector<int> globalOf(points, -1);
    for (const auto& block : blocks)
      for (int idx : block) {
        globalOf[idx] = static_cast<int>(a.effects.size());
        a.effects.push_back(scale * orbit.elements[idx]);
      }
    const int n = g->order();
    std::vector<int32_t> images(static_cast<size_t>(n) * points);
    for (int gi = 0; gi < n; ++gi)
      for (int idx = 0; idx < points; ++idx)
        images[static_cast<size_t>(gi) * points + globalOf[idx]] =
            globalOf[orbit.actionImages[gi][idx]];

    ConstructedAssemblage built;
    try {
      built.symmetry = makeSymmetryData(a, g, std::move(images));
    } catch (const Error& e) {
      out.rejected.push_back(where + ": " + e.what());
      continue;
    }
    auto norm = checkNormalization(a, 1e-8);
    if (!norm.ok) {
      out.rejected.push_back(where + ": normalization failed");
      continue;
    }
    if (!isUniform(a, built.symmetry)) {
      out.rejected.push_back(where + ": not uniform");
      continue;
    }
    auto rig = isRigid(a, built.symmetry);
    if (!rig.rigid) {
      out.rejected.push_back(where + ": not rigid");
      continue;
    }
    bool duplicate = false;
    for (const auto& existing : out.assemblages)
      if (sameAssemblage(a, existing.assemblage, 1e-7)) {
        duplicate = true;
        break;
      }
    if (duplicate) continue;
    built.assemblage = std::move(a);
    built.mode = mode;
    built.stabilizerOrder = static_cast<int>(orbit.stabilizer.size());
    built.key = canonicalKey(built.assemblage);
    out.assemblages.push_back(std::move(built));
  }
}

ConstructionResult constructAssemblages(const GroupPtr& g,
                                        const GroupingMode& mode,
                                        int orderCap) {
  ConstructionResult res;
  auto classes = candidateStabilizers(*g, orderCap);
  std::vector<CMat> seenProjections;
  auto alreadySeen = [&](const CMat& p) {
    for (const auto& q : seenProjections)
      if (maxAbs(p - q) <= 1e-7) return true;
    return false;
  };
  for (const auto& cls : classes) {
    std::pair<CMat, CMat> split;
    try {
      split = isotypicProjection(*g, cls.representative);
    } catch (const Error& e) {
      res.rejected.push_back("subgroup class of order " +
                             std::to_string(cls.order) + ": " + e.what());
      continue;
    }
    for (const CMat& proj : {split.first, split.second}) {
      int rank = roundedRank(proj);
      if (rank <= 0 || rank >= g->dim) continue;
      if (alreadySeen(proj)) continue;
      ProjectionOrbit orbit = orbitOfProjection(*g, proj);
      for (const auto& e : orbit.elements) seenProjections.push_back(e);
      assemblagesFromOrbit(g, orbit, mode, res);
    }
  }
  std::sort(res.assemblages.begin(), res.assemblages.end(),
            [](const ConstructedAssemblage& a, const ConstructedAssemblage& b) {
              int ma = a.assemblage.bundle.measurements();
              int mb = b.assemblage.bundle.measurements();
              if (ma != mb) return ma < mb;
              int oa = a.assemblage.bundle.outcomes();
              int ob = b.assemblage.bundle.outcomes();
              if (oa != ob) return oa < ob;
              return a.key < b.key;
            });
  return res;
}

std::vector<ProjectionOrbit> eigenvectorProjectionOrbits(const GroupPtr& g,
                                                         double tol) {
  std::vector<ProjectionOrbit> out;
  std::vector<CMat> seenProjections;
  auto alreadySeen = [&](const CMat& p) {
    for (const auto& q : seenProjections)
      if (maxAbs(p - q) <= 1e-7) return true;
    return false;
  };
  Eigen::ComplexEigenSolver<CMat> solver;
  const int d = g->dim;
  for (int gi = 0; gi < g->order(); ++gi) {
    if (gi == g->identityIndex) continue;
    solver.compute(g->elements[gi]);
    const auto& vals = solver.eigenvalues();
    for (int k = 0; k < d; ++k) {
      bool degenerate = false;
      for (int j = 0; j < d; ++j)
        if (j != k && std::abs(vals[j] - vals[k]) < 1e-6) degenerate = true;
      if (degenerate) continue;
      Eigen::VectorXcd v = solver.eigenvectors().col(k);
      CMat p = hermitize((v * v.adjoint()) / v.squaredNorm());
      if (alreadySeen(p)) continue;
      ProjectionOrbit orbit = orbitOfProjection(*g, p, tol);
      for (const auto& e : orbit.elements) seenProjections.push_back(e);
      out.push_back(std::move(orbit));
    }
  }
  return out;
}

Assemblage platonicAssemblage(const std::string& solid) {
  auto vecs = platonicVectors(solid);
  Assemblage a;
  a.dim = 2;
  a.bundle = OutcomeBundle::fromFibreSizes(
      std::vector<int>(vecs.size(), 2));
  a.effects.reserve(2 * vecs.size());
  CMat eye = identity(2);
  for (const auto& v : vecs) {
    CMat ns(2, 2);
    ns << std::complex<double>(v[2], 0.0), std::complex<double>(v[0], -v[1]),
        std::complex<double>(v[0], v[1]), std::complex<double>(-v[2], 0.0);
    a.effects.push_back(hermitize((eye + ns) / 2.0));
    a.effects.push_back(hermitize((eye - ns) / 2.0));
  }
  auto norm = checkNormalization(a, 1e-9);
  if (!norm.ok)
    throw InvariantViolation("platonic Bloch vectors are not unit vectors");
  return a;
}

}  // namespace symmetra
