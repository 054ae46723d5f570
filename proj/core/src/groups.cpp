#include "symmetra/groups.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <queue>
#include <random>

namespace symmetra {

namespace {

// Tolerance used when confirming key-based matches with exact arithmetic.
constexpr double kConfirmTol = 1e-6;

void appendQuantized(std::string& out, double v, double quantum) {
  const int64_t q = static_cast<int64_t>(std::llround(v / quantum));
  char buf[sizeof(int64_t)];
  std::memcpy(buf, &q, sizeof(q));
  out.append(buf, sizeof(q));
}

bool isUnitary(const CMat& u, double tol) {
  if (u.rows() != u.cols()) return false;
  return maxAbs(u.adjoint() * u - CMat::Identity(u.rows(), u.cols())) <= tol;
}

}  // namespace

std::string quantizedKey(const CMat& m, double quantum) {
  std::string out;
  out.reserve(static_cast<size_t>(m.size()) * 2 * sizeof(int64_t));
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      appendQuantized(out, m(r, c).real(), quantum);
      appendQuantized(out, m(r, c).imag(), quantum);
    }
  }
  return out;
}

std::string FiniteMatrixGroup::elementKey(int i, double quantum) const {
  return quantizedKey(elements[i], quantum);
}

int FiniteMatrixGroup::indexOf(const CMat& m, double quantum) const {
  const auto it = keyToIndex.find(quantizedKey(m, quantum));
  if (it == keyToIndex.end()) return -1;
  if (!approxEqual(elements[it->second], m, kConfirmTol)) return -1;
  return it->second;
}

FiniteMatrixGroup makeGroupFromElements(std::vector<CMat> elements,
                                        std::vector<int> generatorIndices) {
  if (elements.empty()) throw Error("group needs at least one element");
  const int n = static_cast<int>(elements.size());
  const int d = static_cast<int>(elements.front().rows());

  FiniteMatrixGroup g;
  g.dim = d;
  g.elements = std::move(elements);
  g.generatorIndices = std::move(generatorIndices);
  for (int i = 0; i < n; ++i) {
    const auto [it, inserted] = g.keyToIndex.emplace(g.elementKey(i), i);
    (void)it;
    if (!inserted) throw Error("duplicate element in group list");
  }

  g.identityIndex = g.indexOf(CMat::Identity(d, d));
  if (g.identityIndex < 0) throw Error("group list lacks the identity");

  g.multTable.assign(static_cast<size_t>(n) * n, -1);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const CMat prod = g.elements[a] * g.elements[b];
      const int c = g.indexOf(prod);
      if (c < 0) throw Error("element list is not closed under multiplication");
      g.multTable[static_cast<size_t>(a) * n + b] = c;
    }
  }

  g.invTable.assign(n, -1);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (g.mult(a, b) == g.identityIndex) {
        g.invTable[a] = b;
        break;
      }
    }
    if (g.invTable[a] < 0) throw Error("element without inverse");
  }
  return g;
}

FiniteMatrixGroup closeGenerators(const std::vector<CMat>& generators,
                                  int maxOrder) {
  if (generators.empty()) throw Error("need at least one generator");
  const int d = static_cast<int>(generators.front().rows());
  for (const CMat& u : generators) {
    if (u.rows() != d || u.cols() != d) {
      throw NotUnitary("generators have mismatched dimensions");
    }
    if (!isUnitary(u, 1e-8)) throw NotUnitary("generator is not unitary");
  }

  std::vector<CMat> elems;
  std::unordered_map<std::string, int> seen;
  auto add = [&](const CMat& m) -> bool {
    const std::string key = quantizedKey(m);
    if (seen.count(key)) return false;
    seen.emplace(key, static_cast<int>(elems.size()));
    elems.push_back(m);
    return true;
  };

  add(CMat::Identity(d, d));
  std::vector<int> genIdx;
  for (const CMat& u : generators) {
    add(u);
    genIdx.push_back(seen.at(quantizedKey(u)));
  }

  // Breadth-first closure: multiply the frontier by every generator.
  size_t frontierBegin = 0;
  while (frontierBegin < elems.size()) {
    const size_t frontierEnd = elems.size();
    for (size_t i = frontierBegin; i < frontierEnd; ++i) {
      for (const CMat& u : generators) {
        const CMat prod = elems[i] * u;
        if (add(prod) && static_cast<int>(elems.size()) > maxOrder) {
          throw OrderExceeded("closure exceeds maxOrder = " +
                              std::to_string(maxOrder));
        }
      }
    }
    frontierBegin = frontierEnd;
  }

  // Deduplicate generator indices while keeping their order.
  std::vector<int> uniqueGens;
  for (int gi : genIdx) {
    if (std::find(uniqueGens.begin(), uniqueGens.end(), gi) == uniqueGens.end())
      uniqueGens.push_back(gi);
  }
  return makeGroupFromElements(std::move(elems), std::move(uniqueGens));
}

FiniteMatrixGroup makeGroupFromTable(std::vector<CMat> elements,
                                     std::vector<int32_t> multTable,
                                     std::vector<int> generatorIndices) {
  const int n = static_cast<int>(elements.size());
  if (n == 0) throw Error("group needs at least one element");
  if (multTable.size() != static_cast<size_t>(n) * n) {
    throw Error("multiplication table has the wrong size");
  }

  FiniteMatrixGroup g;
  g.dim = static_cast<int>(elements.front().rows());
  g.elements = std::move(elements);
  g.multTable = std::move(multTable);
  g.generatorIndices = std::move(generatorIndices);
  for (int i = 0; i < n; ++i) g.keyToIndex.emplace(g.elementKey(i), i);

  // Latin square property: every row and column is a permutation.
  std::vector<char> mark(n);
  for (int a = 0; a < n; ++a) {
    std::fill(mark.begin(), mark.end(), 0);
    for (int b = 0; b < n; ++b) {
      const int c = g.mult(a, b);
      if (c < 0 || c >= n || mark[c]) throw Error("table row is not a permutation");
      mark[c] = 1;
    }
  }
  for (int b = 0; b < n; ++b) {
    std::fill(mark.begin(), mark.end(), 0);
    for (int a = 0; a < n; ++a) {
      const int c = g.mult(a, b);
      if (mark[c]) throw Error("table column is not a permutation");
      mark[c] = 1;
    }
  }

  // Identity and inverses.
  g.identityIndex = -1;
  for (int e = 0; e < n; ++e) {
    bool ok = true;
    for (int b = 0; b < n && ok; ++b) {
      ok = g.mult(e, b) == b && g.mult(b, e) == b;
    }
    if (ok) {
      g.identityIndex = e;
      break;
    }
  }
  if (g.identityIndex < 0) throw Error("table has no identity");
  g.invTable.assign(n, -1);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (g.mult(a, b) == g.identityIndex && g.mult(b, a) == g.identityIndex) {
        g.invTable[a] = b;
        break;
      }
    }
    if (g.invTable[a] < 0) throw Error("table element without inverse");
  }

  // Associativity spot check (full check is cubic; sampling is plenty to
  // catch a malformed table).
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> pick(0, n - 1);
  const int trials = std::min(20000, n * n);
  for (int t = 0; t < trials; ++t) {
    const int a = pick(rng), b = pick(rng), c = pick(rng);
    if (g.mult(g.mult(a, b), c) != g.mult(a, g.mult(b, c))) {
      throw Error("multiplication table is not associative");
    }
  }

  // Decide whether the matrices realise the table exactly or only up to
  // phases.  Small groups are checked over all pairs; larger ones are
  // conservatively marked projective.
  if (n <= 700) {
    bool anyPhase = false;
    for (int a = 0; a < n && !anyPhase; ++a) {
      for (int b = 0; b < n; ++b) {
        const CMat prod = g.elements[a] * g.elements[b];
        const CMat& tgt = g.elements[g.mult(a, b)];
        if (approxEqual(prod, tgt, kConfirmTol)) continue;
        // Find the phase from the largest entry of tgt.
        Eigen::Index r = 0, c = 0;
        tgt.cwiseAbs().maxCoeff(&r, &c);
        const Complex phase = prod(r, c) / tgt(r, c);
        if (std::abs(std::abs(phase) - 1.0) > kConfirmTol ||
            !approxEqual(prod, phase * tgt, kConfirmTol)) {
          throw Error("matrices do not realise the multiplication table");
        }
        anyPhase = true;
        break;
      }
    }
    g.projective = anyPhase;
  } else {
    g.projective = true;
  }
  return g;
}

// --------------------------------------------------------------- subgroups

namespace {

std::string subgroupKey(const std::vector<int>& sorted) {
  std::string out;
  out.reserve(sorted.size() * sizeof(int32_t));
  for (int x : sorted) {
    const int32_t v = x;
    char buf[sizeof(int32_t)];
    std::memcpy(buf, &v, sizeof(v));
    out.append(buf, sizeof(v));
  }
  return out;
}

bool isPrimePower(int o) {
  if (o < 2) return false;
  int p = 0;
  for (int q = 2; q <= o; ++q) {
    if (o % q == 0) {
      p = q;
      break;
    }
  }
  while (o % p == 0) o /= p;
  return o == 1;
}

// Closure of subgroup `seed` extended by `extra`, multiplying only by the
// stored generating set (plus `extra`) for speed.
std::vector<int> closureOf(const FiniteMatrixGroup& g,
                           const std::vector<int>& seed,
                           const std::vector<int>& seedGens, int extra) {
  std::vector<uint8_t> member(g.order(), 0);
  std::vector<int> cur;
  cur.reserve(seed.size() * 2);
  for (int x : seed) {
    member[x] = 1;
    cur.push_back(x);
  }
  if (!member[extra]) {
    member[extra] = 1;
    cur.push_back(extra);
  }
  std::vector<int> gens = seedGens;
  gens.push_back(extra);
  std::vector<int> frontier = cur;
  while (!frontier.empty()) {
    std::vector<int> next;
    for (int a : frontier) {
      for (int b : gens) {
        const int c = g.mult(a, b);
        if (!member[c]) {
          member[c] = 1;
          cur.push_back(c);
          next.push_back(c);
        }
      }
    }
    frontier = std::move(next);
  }
  std::sort(cur.begin(), cur.end());
  return cur;
}

}  // namespace

std::vector<SubgroupClass> enumerateSubgroupClasses(const FiniteMatrixGroup& g,
                                                    int orderCap) {
  const int n = g.order();
  if (n > orderCap) {
    throw TooLarge("group order " + std::to_string(n) +
                   " exceeds subgroup enumeration cap " +
                   std::to_string(orderCap));
  }
  const int e = g.identityIndex;

  // Element orders and the prime-power-order extension pool.
  std::vector<int> elemOrder(n, 1);
  for (int a = 0; a < n; ++a) {
    if (a == e) continue;
    int o = 1, x = a;
    while (x != e) {
      x = g.mult(x, a);
      ++o;
    }
    elemOrder[a] = o;
  }
  std::vector<int> ppow;
  for (int a = 0; a < n; ++a) {
    if (a != e && isPrimePower(elemOrder[a])) ppow.push_back(a);
  }

  struct Entry {
    std::vector<int> rep;  // sorted
    std::vector<int> gens;
    int classSize = 0;
  };
  std::vector<Entry> classes;
  std::unordered_map<std::string, int> seen;  // any conjugate -> class id

  auto registerSubgroup = [&](std::vector<int> sub, std::vector<int> gens) -> bool {
    const std::string key = subgroupKey(sub);
    if (seen.count(key)) return false;
    // Enumerate the conjugacy class of the subgroup.
    std::vector<std::string> conjKeys;
    std::vector<int> conj(sub.size());
    for (int a = 0; a < n; ++a) {
      const int ia = g.inv(a);
      for (size_t i = 0; i < sub.size(); ++i) conj[i] = g.mult(g.mult(a, sub[i]), ia);
      std::sort(conj.begin(), conj.end());
      conjKeys.push_back(subgroupKey(conj));
    }
    std::sort(conjKeys.begin(), conjKeys.end());
    conjKeys.erase(std::unique(conjKeys.begin(), conjKeys.end()), conjKeys.end());
    const int cid = static_cast<int>(classes.size());
    for (const std::string& k : conjKeys) seen.emplace(k, cid);
    classes.push_back({std::move(sub), std::move(gens),
                       static_cast<int>(conjKeys.size())});
    return true;
  };

  registerSubgroup({e}, {});
  for (int a = 0; a < n; ++a) {
    if (a == e) continue;
    std::vector<int> cyc{e};
    int x = a;
    while (x != e) {
      cyc.push_back(x);
      x = g.mult(x, a);
    }
    std::sort(cyc.begin(), cyc.end());
    registerSubgroup(std::move(cyc), {a});
  }

  // Process representatives in nondecreasing size order, extending by
  // prime-power-order elements.
  using Item = std::pair<size_t, int>;  // (subgroup order, class id)
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> work;
  for (int i = 0; i < static_cast<int>(classes.size()); ++i) {
    work.push({classes[i].rep.size(), i});
  }
  while (!work.empty()) {
    const int cid = work.top().second;
    work.pop();
    const std::vector<int> rep = classes[cid].rep;    // copy: classes may grow
    const std::vector<int> gens = classes[cid].gens;
    std::vector<uint8_t> member(n, 0);
    for (int x : rep) member[x] = 1;
    for (int a : ppow) {
      if (member[a]) continue;
      std::vector<int> ext = closureOf(g, rep, gens, a);
      if (ext.size() == rep.size()) continue;
      std::vector<int> extGens = gens;
      extGens.push_back(a);
      const size_t sz = ext.size();
      if (registerSubgroup(std::move(ext), std::move(extGens))) {
        work.push({sz, static_cast<int>(classes.size()) - 1});
      }
    }
  }

  std::vector<SubgroupClass> out;
  out.reserve(classes.size());
  for (Entry& c : classes) {
    SubgroupClass sc;
    sc.order = static_cast<int>(c.rep.size());
    sc.classSize = c.classSize;
    sc.representative = std::move(c.rep);
    out.push_back(std::move(sc));
  }
  std::sort(out.begin(), out.end(), [](const SubgroupClass& a, const SubgroupClass& b) {
    if (a.order != b.order) return a.order < b.order;
    if (a.classSize != b.classSize) return a.classSize < b.classSize;
    return a.representative < b.representative;
  });
  return out;
}

// ----------------------------------------------------------------- actions

PermAction makePermAction(GroupPtr group, std::vector<int32_t> flatImages,
                          int points) {
  if (!group) throw Error("action needs a group");
  const int n = group->order();
  if (flatImages.size() != static_cast<size_t>(n) * points) {
    throw Error("action image table has the wrong size");
  }
  PermAction act;
  act.group = std::move(group);
  act.points = points;
  act.images = std::move(flatImages);

  std::vector<char> mark(points);
  for (int a = 0; a < n; ++a) {
    std::fill(mark.begin(), mark.end(), 0);
    for (int s = 0; s < points; ++s) {
      const int t = act.apply(a, s);
      if (t < 0 || t >= points || mark[t]) {
        throw Error("action row is not a permutation");
      }
      mark[t] = 1;
    }
  }
  const int e = act.group->identityIndex;
  for (int s = 0; s < points; ++s) {
    if (act.apply(e, s) != s) throw Error("identity does not act trivially");
  }
  // Compositions along generators pin every row by induction on word length.
  std::vector<int> gens = act.group->generatorIndices;
  if (gens.empty()) {
    for (int a = 0; a < n; ++a) gens.push_back(a);
  }
  for (int a : gens) {
    for (int h = 0; h < n; ++h) {
      const int ah = act.group->mult(a, h);
      for (int s = 0; s < points; ++s) {
        if (act.apply(ah, s) != act.apply(a, act.apply(h, s))) {
          throw Error("action is not a homomorphism");
        }
      }
    }
  }
  return act;
}

std::vector<std::vector<int>> orbits(const PermAction& action) {
  std::vector<std::vector<int>> out;
  std::vector<char> done(action.points, 0);
  const int n = action.group->order();
  for (int s = 0; s < action.points; ++s) {
    if (done[s]) continue;
    std::vector<int> orb;
    std::vector<int> stack{s};
    done[s] = 1;
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      orb.push_back(x);
      for (int a = 0; a < n; ++a) {
        const int y = action.apply(a, x);
        if (!done[y]) {
          done[y] = 1;
          stack.push_back(y);
        }
      }
    }
    std::sort(orb.begin(), orb.end());
    out.push_back(std::move(orb));
  }
  return out;
}

std::vector<int> stabilizer(const PermAction& action, int point) {
  std::vector<int> out;
  for (int a = 0; a < action.group->order(); ++a) {
    if (action.apply(a, point) == point) out.push_back(a);
  }
  return out;
}

// --------------------------------------------------------------- commutant

std::vector<CMat> commutantBasis(const std::vector<CMat>& unitaries, int dim) {
  int d = dim;
  if (!unitaries.empty()) d = static_cast<int>(unitaries.front().rows());
  if (d <= 0) throw Error("commutantBasis needs a dimension");

  if (unitaries.empty()) {
    // Commutant of nothing: the full matrix space, in the unit basis.
    std::vector<CMat> out;
    out.reserve(static_cast<size_t>(d) * d);
    for (int c = 0; c < d; ++c) {
      for (int r = 0; r < d; ++r) {
        CMat e = CMat::Zero(d, d);
        e(r, c) = 1.0;
        out.push_back(e);
      }
    }
    return out;
  }

  // Accumulate M = sum_U K^dagger K with K = I (x) U - U^T (x) I acting on
  // column-major vec(X); the nullspace of M is the commutant.
  const int dd = d * d;
  CMat m = CMat::Zero(dd, dd);
  const CMat eye = CMat::Identity(d, d);
  for (const CMat& u : unitaries) {
    if (u.rows() != d || u.cols() != d) {
      throw Error("commutantBasis: mismatched dimensions");
    }
    CMat k(dd, dd);
    // kron(A, B) with A = I, minus kron(U^T, I).
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        k.block(i * d, j * d, d, d) = eye(i, j) * u - u(j, i) * eye;
      }
    }
    m.noalias() += k.adjoint() * k;
  }

  Eigen::SelfAdjointEigenSolver<CMat> solver(m);
  if (solver.info() != Eigen::Success) throw NoConvergence("commutant eigensolve");
  const double lambdaMax = solver.eigenvalues()[dd - 1];
  const double thr = 1e-7 * std::max(1.0, lambdaMax);

  std::vector<CMat> out;
  for (int i = 0; i < dd; ++i) {
    if (solver.eigenvalues()[i] > thr) break;
    CMat x(d, d);
    for (int c = 0; c < d; ++c) {
      for (int r = 0; r < d; ++r) x(r, c) = solver.eigenvectors()(c * d + r, i);
    }
    // Exact confirmation that the vector commutes with every unitary.
    for (const CMat& u : unitaries) {
      if (maxAbs(x * u - u * x) > kConfirmTol) {
        throw NoConvergence("commutant nullspace threshold is ambiguous");
      }
    }
    out.push_back(std::move(x));
  }
  return out;
}

int countIrreducibleSubreps(const FiniteMatrixGroup& g,
                            const std::vector<int>& subgroup) {
  if (g.projective) {
    throw ProjectivePhases(
        "characters are not defined for a projective representation");
  }
  if (subgroup.empty()) throw Error("empty subgroup");
  double s = 0.0;
  for (int h : subgroup) {
    const double t = std::abs(g.elements[h].trace());
    s += t * t;
  }
  return static_cast<int>(std::lround(s / static_cast<double>(subgroup.size())));
}

}  // namespace symmetra
