#include "symmetra/incompat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "symmetra/errors.hpp"
#include "symmetra/numerics.hpp"

namespace symmetra {
namespace {

constexpr double kCertTol = 1e-9;

double realTrace(const CMat& m) { return m.trace().real(); }

// Uniform effect trace d|M|/|Omega|, as implied by normalization plus
// constancy; throws NotUniform on deviation.
double requireUniformTrace(const Assemblage& a) {
  const double t = static_cast<double>(a.dim) * a.bundle.measurements() /
                   a.bundle.outcomes();
  for (int z = 0; z < a.bundle.outcomes(); ++z) {
    const double tz = realTrace(a.effects[z]);
    if (std::abs(tz - t) > 1e-8 * std::max(1.0, std::abs(t))) {
      std::ostringstream os;
      os << "effect " << z << " has trace " << tz << ", expected uniform " << t;
      throw NotUniform(os.str());
    }
  }
  return t;
}

// ------------------------------------------------------------ section scans

// Extreme eigenvalues by matrix size: closed form for 2x2, the direct (non
// iterative) solver for 3x3, the iterative solver otherwise.
void extremalEigs(const Eigen::Matrix2cd& s, double& lo, double& hi) {
  const double mid = 0.5 * (s(0, 0).real() + s(1, 1).real());
  const double rad =
      std::hypot(0.5 * (s(0, 0).real() - s(1, 1).real()), std::abs(s(0, 1)));
  lo = mid - rad;
  hi = mid + rad;
}

void extremalEigs(const Eigen::Matrix3cd& s, double& lo, double& hi) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> es;
  es.computeDirect(s, Eigen::EigenvaluesOnly);
  lo = es.eigenvalues()(0);
  hi = es.eigenvalues()(2);
}

struct DynamicEigs {
  Eigen::SelfAdjointEigenSolver<CMat> es;
  void operator()(const CMat& s, double& lo, double& hi) {
    es.compute(s, Eigen::EigenvaluesOnly);
    lo = es.eigenvalues()(0);
    hi = es.eigenvalues()(s.rows() - 1);
  }
};

struct ScanExtremes {
  double maxVal = -std::numeric_limits<double>::infinity();
  uint64_t maxIdx = 0;
  double minVal = std::numeric_limits<double>::infinity();
  uint64_t minIdx = 0;

  void absorb(double lo, double hi, uint64_t idx) {
    if (hi > maxVal) {
      maxVal = hi;
      maxIdx = idx;
    }
    if (lo < minVal) {
      minVal = lo;
      minIdx = idx;
    }
  }
  // Merge a tracker covering strictly higher indices: on an exact value tie
  // the earlier (lower-index) section is kept.
  void merge(const ScanExtremes& higher) {
    if (higher.maxVal > maxVal) {
      maxVal = higher.maxVal;
      maxIdx = higher.maxIdx;
    }
    if (higher.minVal < minVal) {
      minVal = higher.minVal;
      minIdx = higher.minIdx;
    }
  }
};

// One pass over the section-index range [first, last): an odometer over
// local outcomes (measurement m-1 fastest, matching sectionFromIndex) with
// running prefix sums, so each step costs O(1) matrix additions amortised.
template <typename MatT, typename EigFn>
void scanRange(const Assemblage& a, const std::vector<MatT>& eff,
               uint64_t first, uint64_t last, EigFn&& eigs,
               ScanExtremes& out) {
  const OutcomeBundle& b = a.bundle;
  const int m = b.measurements();
  std::vector<int> digit(m, 0);
  uint64_t rem = first;
  for (int x = m - 1; x >= 0; --x) {
    const auto size = static_cast<uint64_t>(b.fibreSizes[x]);
    digit[x] = static_cast<int>(rem % size);
    rem /= size;
  }
  std::vector<MatT> prefix(m + 1, MatT::Zero(a.dim, a.dim));
  for (int x = 0; x < m; ++x)
    prefix[x + 1] = prefix[x] + eff[b.globalIndex(x, digit[x])];

  double lo = 0.0, hi = 0.0;
  for (uint64_t idx = first; idx < last; ++idx) {
    eigs(prefix[m], lo, hi);
    out.absorb(lo, hi, idx);
    int x = m - 1;
    while (x >= 0 && ++digit[x] == b.fibreSizes[x]) digit[x--] = 0;
    if (x < 0) break;  // wrapped past the final section
    for (int k = x; k < m; ++k)
      prefix[k + 1] = prefix[k] + eff[b.globalIndex(k, digit[k])];
  }
}

template <typename MatT>
ScanExtremes scanAllTyped(const Assemblage& a, uint64_t total, int threads) {
  std::vector<MatT> eff(a.effects.size());
  for (size_t z = 0; z < a.effects.size(); ++z) eff[z] = a.effects[z];

  const auto makeEigs = [] {
    if constexpr (std::is_same_v<MatT, CMat>)
      return DynamicEigs{};
    else
      return [](const MatT& s, double& lo, double& hi) {
        extremalEigs(s, lo, hi);
      };
  };

  if (threads <= 1 || total < 4096) {
    ScanExtremes tr;
    auto eigs = makeEigs();
    scanRange(a, eff, 0, total, eigs, tr);
    return tr;
  }
  const auto t = static_cast<uint64_t>(threads);
  const uint64_t per = (total + t - 1) / t;
  std::vector<ScanExtremes> parts(threads);
  std::vector<std::thread> pool;
  for (int i = 0; i < threads; ++i) {
    const uint64_t first = std::min(total, per * static_cast<uint64_t>(i));
    const uint64_t last = std::min(total, first + per);
    if (first >= last) continue;
    pool.emplace_back([&, i, first, last] {
      auto eigs = makeEigs();
      scanRange(a, eff, first, last, eigs, parts[i]);
    });
  }
  for (auto& th : pool) th.join();
  ScanExtremes tr = parts[0];
  for (int i = 1; i < threads; ++i) tr.merge(parts[i]);
  return tr;
}

ScanExtremes scanAll(const Assemblage& a, const ScanOptions& opts) {
  const uint64_t total = a.bundle.sectionCount();
  if (total > opts.sectionCap) {
    std::ostringstream os;
    os << total << " sections exceed the cap " << opts.sectionCap;
    throw TooManySections(os.str());
  }
  const int threads = std::max(1, opts.threads);
  if (a.dim == 2) return scanAllTyped<Eigen::Matrix2cd>(a, total, threads);
  if (a.dim == 3) return scanAllTyped<Eigen::Matrix3cd>(a, total, threads);
  return scanAllTyped<CMat>(a, total, threads);
}

CMat sectionSum(const Assemblage& a, const Section& s) {
  CMat sum = CMat::Zero(a.dim, a.dim);
  for (int z : s.outcomes) sum += a.effects[z];
  return sum;
}

// Recomputes the winning value with the iterative solver (full accuracy; the
// fixed-size scan paths trade a few digits for speed).
SectionStatistic refinedStat(const Assemblage& a, uint64_t index, bool isMax) {
  SectionStatistic st;
  st.section = sectionFromIndex(a.bundle, index);
  const CMat sum = sectionSum(a, st.section);
  st.value = isMax ? maxEig(sum) : minEig(sum);
  st.method = StatMethod::Exhaustive;
  st.boundDirection = BoundKind::Exact;
  return st;
}

struct ScanPair {
  SectionStatistic lambda, mu;
};

ScanPair scanBoth(const Assemblage& a, const ScanOptions& opts) {
  const ScanExtremes tr = scanAll(a, opts);
  return {refinedStat(a, tr.maxIdx, true), refinedStat(a, tr.minIdx, false)};
}

// Greedy section growth, ported verbatim from the reference heuristic: start
// from (measurement 0, outcome 0); at each step add the pair with the
// extremal running eigenvalue, breaking exact ties towards the lowest
// (measurement, outcome).
SectionStatistic greedyScan(const Assemblage& a, bool minimize) {
  const OutcomeBundle& b = a.bundle;
  const int m = b.measurements();
  std::vector<int> chosen(m, -1);
  chosen[0] = 0;
  CMat sum = a.effects[b.globalIndex(0, 0)];
  for (int step = 1; step < m; ++step) {
    int bestY = -1, bestO = -1;
    double bestVal = 0.0;
    for (int y = 0; y < m; ++y) {
      if (chosen[y] >= 0) continue;
      for (int o = 0; o < b.fibreSizes[y]; ++o) {
        const CMat cand = sum + a.effects[b.globalIndex(y, o)];
        const double val = minimize ? minEig(cand) : maxEig(cand);
        const bool better =
            bestY < 0 || (minimize ? val < bestVal : val > bestVal);
        if (better) {
          bestY = y;
          bestO = o;
          bestVal = val;
        }
      }
    }
    chosen[bestY] = bestO;
    sum += a.effects[b.globalIndex(bestY, bestO)];
  }
  SectionStatistic st;
  st.section.outcomes.resize(m);
  for (int x = 0; x < m; ++x)
    st.section.outcomes[x] = b.globalIndex(x, chosen[x]);
  st.value = minimize ? minEig(sum) : maxEig(sum);
  st.method = StatMethod::Greedy;
  st.boundDirection = minimize ? BoundKind::UpperBound : BoundKind::LowerBound;
  return st;
}

double clampUnit(double v, const char* what) {
  if (v < -kCertTol || v > 1.0 + kCertTol) {
    std::ostringstream os;
    os << what << " = " << v << " outside [0, 1]";
    throw InvariantViolation(os.str());
  }
  return std::min(1.0, std::max(0.0, v));
}

}  // namespace

Assemblage noisyAssemblage(const Assemblage& a, double eta, NoiseKind kind) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    std::ostringstream os;
    os << "eta = " << eta << " outside [0, 1]";
    throw EtaOutOfRange(os.str());
  }
  const int d = a.dim;
  if (kind == NoiseKind::Complement && d < 2)
    throw InvariantViolation("complement noise requires dimension >= 2");
  Assemblage out = a;
  const CMat one = identity(d);
  for (auto& e : out.effects) {
    const double t = realTrace(e);
    const CMat signal =
        (kind == NoiseKind::White) ? e : CMat((t * one - e) / (d - 1));
    e = eta * signal + ((1.0 - eta) * t / d) * one;
  }
  return out;
}

Assemblage complementAssemblage(const Assemblage& a) {
  if (a.dim < 2)
    throw InvariantViolation("complement assemblage requires dimension >= 2");
  Assemblage out = a;
  const CMat one = identity(a.dim);
  for (auto& e : out.effects) e = (realTrace(e) * one - e) / (a.dim - 1);
  return out;
}

double normalizationConstantZ(const Assemblage& a) {
  requireUniformTrace(a);
  const double m = a.bundle.measurements();
  const double omega = a.bundle.outcomes();
  double sum = 0.0;
  // Tr A^2 = ||A||_F^2 for Hermitian A.
  for (const CMat& e : a.effects) sum += e.squaredNorm();
  return sum - a.dim * m * m / omega;
}

SectionStatistic lambdaExhaustive(const Assemblage& a,
                                  const ScanOptions& opts) {
  return scanBoth(a, opts).lambda;
}

SectionStatistic muExhaustive(const Assemblage& a, const ScanOptions& opts) {
  return scanBoth(a, opts).mu;
}

SectionStatistic lambdaGreedy(const Assemblage& a) {
  return greedyScan(a, false);
}

SectionStatistic muGreedy(const Assemblage& a) { return greedyScan(a, true); }

double alphaStar(const Assemblage& a, double z,
                 const SectionStatistic& lambda) {
  if (!(z > 0.0)) throw InvariantViolation("normalization constant Z <= 0");
  const double m = a.bundle.measurements();
  const double omega = a.bundle.outcomes();
  return (a.dim / z) * (lambda.value - m * m / omega);
}

double betaStar(const Assemblage& a, double z, const SectionStatistic& mu) {
  if (!(z > 0.0)) throw InvariantViolation("normalization constant Z <= 0");
  const double m = a.bundle.measurements();
  const double omega = a.bundle.outcomes();
  return (a.dim * (a.dim - 1) / z) * (m * m / omega - mu.value);
}

RobustnessReport robustnessReport(const Assemblage& a, const SymmetryData* sym,
                                  StatMethod method, const ScanOptions& opts) {
  RobustnessReport r;
  r.Z = normalizationConstantZ(a);

  r.rankOneProjective = true;
  for (const CMat& e : a.effects) {
    const ProjectionCheck pc = isProjection(e, 1e-8);
    if (!pc.isProjection || pc.rank != 1) {
      r.rankOneProjective = false;
      break;
    }
  }

  std::string note;
  if (method == StatMethod::Exhaustive) {
    const ScanPair pair = scanBoth(a, opts);
    r.lambda = pair.lambda;
    r.mu = pair.mu;
  } else {
    r.lambda = lambdaGreedy(a);
    r.mu = muGreedy(a);
    // Section sums are PSD, so mu >= 0 always: a greedy upper bound at the
    // floor is already exact.
    if (r.mu.value <= 1e-10) {
      r.mu.value = 0.0;
      r.mu.boundDirection = BoundKind::Exact;
      note += "greedy mu reached the PSD floor, promoted to exact 0; ";
    }
  }

  r.alphaStar = clampUnit(alphaStar(a, r.Z, r.lambda), "alphaStar");
  r.betaStar = clampUnit(betaStar(a, r.Z, r.mu), "betaStar");
  r.alphaBound = (r.lambda.boundDirection == BoundKind::Exact)
                     ? BoundKind::Exact
                     : BoundKind::LowerBound;
  r.betaBound = (r.mu.boundDirection == BoundKind::Exact)
                    ? BoundKind::Exact
                    : BoundKind::LowerBound;

  if (sym != nullptr) {
    checkSymmetry(a, *sym);
    const bool uniform = isUniform(a, *sym);
    const bool rigid = uniform && isRigid(a, *sym).rigid;
    r.formulaCertified = uniform && rigid;
    note += r.formulaCertified
                ? "uniform and rigid: closed forms are the exact thresholds"
                : "formula not certified: not uniform+rigid under the supplied "
                  "symmetry";
  } else {
    r.formulaCertified = false;
    note += "formula not certified: no symmetry supplied";
  }
  r.certificationNote = note;
  return r;
}

void requireCertified(const RobustnessReport& rep) {
  if (!rep.formulaCertified)
    throw NotUniformOrRigid(
        "closed-form thresholds were not certified: " + rep.certificationNote);
}

DualCertificate dualCertificate(const Assemblage& a,
                                const RobustnessReport& rep,
                                const ScanOptions& opts) {
  const int d = a.dim;
  const double m = a.bundle.measurements();
  const double z = rep.Z;
  if (!(z > 0.0))
    throw InfeasibleCertificate("normalization constant Z is not positive");

  double lambda = rep.lambda.value;
  if (rep.lambda.boundDirection != BoundKind::Exact) {
    if (a.bundle.sectionCount() > opts.sectionCap) {
      std::ostringstream os;
      os << "lambda is a heuristic bound and " << a.bundle.sectionCount()
         << " sections exceed the cap " << opts.sectionCap
         << "; exact lambda unavailable";
      throw InfeasibleCertificate(os.str());
    }
    lambda = scanBoth(a, opts).lambda.value;
  }

  DualCertificate c;
  c.a = lambda / (m * z);
  c.b = -1.0 / z;
  const CMat one = identity(d);
  c.perOutcome.resize(a.effects.size());
  double traceXA = 0.0, traceProducts = 0.0;
  for (size_t zo = 0; zo < a.effects.size(); ++zo) {
    c.perOutcome[zo] = c.a * one + c.b * a.effects[zo];
    traceXA += (c.perOutcome[zo] * a.effects[zo]).trace().real();
    traceProducts +=
        realTrace(a.effects[zo]) * realTrace(c.perOutcome[zo]);
  }
  c.firstConstraint = std::abs(1.0 + traceXA - traceProducts / d);
  // For every section, minEig(sum_x X_{s(x)}) = a|M| + b maxEig(sum_x
  // A_{s(x)}) with b < 0, so the worst case is attained at lambda directly.
  c.worstSectionMinEig = c.a * m + c.b * lambda;
  c.certifiedUpperBound = 1.0 + traceXA;
  c.feasible = c.firstConstraint <= kCertTol &&
               c.worstSectionMinEig >= -kCertTol;
  if (!c.feasible) {
    std::ostringstream os;
    os << "dual residuals too large: first constraint " << c.firstConstraint
       << ", worst section min-eig " << c.worstSectionMinEig;
    throw InfeasibleCertificate(os.str());
  }
  return c;
}

namespace {

// Derives the outcome/measurement permutation realised by an antiunitary
// symmetry A_z -> W A_z^T W^dagger and appends it as a section-symmetry
// generator.
void appendInvolution(const Assemblage& a, const AntiunitaryInvolution& inv,
                      SectionSymmetry& gens) {
  const CMat& w = inv.w;
  if (w.rows() != a.dim || w.cols() != a.dim ||
      maxAbs(w.adjoint() * w - identity(a.dim)) > 1e-8)
    throw NotUnitary("antiunitary involution matrix is not unitary");
  const int omega = a.bundle.outcomes();
  std::vector<int32_t> op(omega, -1);
  std::vector<int> hits(omega, 0);
  for (int z = 0; z < omega; ++z) {
    const CMat mapped = w * a.effects[z].transpose() * w.adjoint();
    int found = -1;
    for (int t = 0; t < omega; ++t) {
      if (maxAbs(mapped - a.effects[t]) <= 1e-8) {
        found = t;
        break;
      }
    }
    if (found < 0)
      throw NotSymmetric(
          "antiunitary involution does not permute the effects");
    op[z] = found;
    ++hits[found];
  }
  for (int z = 0; z < omega; ++z)
    if (hits[z] != 1)
      throw NotSymmetric("antiunitary involution is not an outcome bijection");
  std::vector<int32_t> mp(a.bundle.measurements(), -1);
  for (int z = 0; z < omega; ++z) {
    const int x = a.bundle.measurementOf(z);
    const int xi = a.bundle.measurementOf(op[z]);
    if (mp[x] >= 0 && mp[x] != xi)
      throw NotSymmetric("antiunitary involution does not map fibres to "
                         "fibres");
    mp[x] = xi;
  }
  gens.outcomePerms.push_back(std::move(op));
  gens.measurementPerms.push_back(std::move(mp));
}

double reconstructionDefect(const Assemblage& a, const SymmetryData& s,
                            const OutcomeOrbitData& od) {
  const FiniteMatrixGroup& g = *s.group;
  const int n = g.order();
  const int omega = a.bundle.outcomes();
  double worst = 0.0;
  for (size_t k = 0; k < od.representatives.size(); ++k) {
    const int z0 = od.representatives[k];
    std::vector<CMat> acc(omega);
    std::vector<int> cnt(omega, 0);
    for (int gi = 0; gi < n; ++gi) {
      const int z = s.outcomeAction.apply(gi, z0);
      if (cnt[z] == 0) acc[z] = CMat::Zero(a.dim, a.dim);
      acc[z] += g.elements[gi] * a.effects[z0] * g.elements[gi].adjoint();
      ++cnt[z];
    }
    for (int z = 0; z < omega; ++z) {
      if (cnt[z] == 0) continue;
      worst = std::max(worst, maxAbs(acc[z] / cnt[z] - a.effects[z]));
    }
  }
  return worst;
}

}  // namespace

ReducedPrimal reduceBySymmetry(const Assemblage& a, const SymmetryData& s,
                               const AntiunitaryInvolution* involution,
                               uint64_t sectionCap) {
  checkSymmetry(a, s);
  ReducedPrimal r;
  r.outcomes = orbitRepresentatives(a, s);
  r.outcomeWeights.reserve(r.outcomes.representatives.size());
  // Orbit-stabiliser: the constraint multiplicity |G|/|G_z| is the orbit size.
  for (int sz : r.outcomes.orbitSizes)
    r.outcomeWeights.push_back(static_cast<uint64_t>(sz));
  SectionSymmetry gens = sectionSymmetryFrom(s);
  if (involution != nullptr) appendInvolution(a, *involution, gens);
  r.sections = orbitRepresentatives(a.bundle, gens, sectionCap);
  r.reconstructionDefect = reconstructionDefect(a, s, r.outcomes);
  return r;
}

namespace {

struct DykstraOutcome {
  OracleVerdict verdict = OracleVerdict::Inconclusive;
  int iterations = 0;
  double residual = 0.0;
};

double minEigFast(const CMat& s) {
  if (s.rows() == 2) {
    double lo, hi;
    extremalEigs(Eigen::Matrix2cd(s), lo, hi);
    return lo;
  }
  if (s.rows() == 3) {
    double lo, hi;
    extremalEigs(Eigen::Matrix3cd(s), lo, hi);
    return lo;
  }
  return minEig(s);
}

// Alternating Dykstra projections between the affine marginal subspace
// (closed-form projection) and the PSD product cone, one variable per
// section.  The convergence test runs before the PSD step: the residual is
// the larger of the PSD deficit of the affine iterate and the marginal
// deficit of the current PSD iterate.
DykstraOutcome dykstraUnreduced(const Assemblage& na,
                                const OracleOptions& opts) {
  const OutcomeBundle& b = na.bundle;
  const int d = na.dim;
  const int m = b.measurements();
  const int omega = b.outcomes();
  const double total = static_cast<double>(b.sectionCount());
  std::vector<double> invNx(m);  // 1/N_x = n_x / N
  for (int x = 0; x < m; ++x) invNx[x] = b.fibreSizes[x] / total;

  const std::vector<Section> secs =
      enumerateSections(b, opts.sectionCap);
  const size_t n = secs.size();
  const CMat one = identity(d);
  const CMat zero = CMat::Zero(d, d);

  std::vector<CMat> f(n), p(n, zero), fa(n);
  const double dPow = std::pow(static_cast<double>(d), m);
  for (size_t i = 0; i < n; ++i) {
    double wgt = 1.0;
    for (int z : secs[i].outcomes) wgt *= realTrace(na.effects[z]);
    f[i] = (wgt / dPow) * one;
  }

  std::vector<CMat> marg(omega), delta(omega);
  DykstraOutcome out;
  for (int it = 1; it <= opts.iterationBudget; ++it) {
    for (int z = 0; z < omega; ++z) marg[z] = zero;
    CMat mean = zero;
    for (size_t i = 0; i < n; ++i) {
      for (int z : secs[i].outcomes) marg[z] += f[i];
      mean += f[i];
    }
    mean /= total;

    double margDef = 0.0;
    for (int z = 0; z < omega; ++z)
      margDef = std::max(margDef, maxAbs(marg[z] - na.effects[z]));

    const CMat shift = (m - 1) * (mean - one / total);
    for (int z = 0; z < omega; ++z)
      delta[z] = (na.effects[z] - marg[z]) * invNx[b.measurementOf(z)];

    double psdDef = 0.0;
    for (size_t i = 0; i < n; ++i) {
      fa[i] = f[i] + shift;
      for (int z : secs[i].outcomes) fa[i] += delta[z];
      psdDef = std::max(psdDef, std::max(0.0, -minEigFast(fa[i])));
    }

    out.iterations = it;
    out.residual = std::max(psdDef, margDef);
    if (out.residual <= opts.tolerance) {
      out.verdict = OracleVerdict::Compatible;
      return out;
    }

    for (size_t i = 0; i < n; ++i) {
      const CMat y = fa[i] + p[i];
      f[i] = projectPSD(y);
      p[i] = y - f[i];
    }
  }
  return out;
}

// Same iteration restricted to section-orbit representatives.  Dykstra
// preserves equivariance (the start point is invariant and both projections
// commute with the group action), so marginals at outcome representatives
// are assembled through aggregated transfer maps sum_g conj(U_g) (x) U_g over
// the elements sending the representative section's coordinate to the
// representative outcome, and transported to other outcomes by covariance.
DykstraOutcome dykstraReduced(const Assemblage& na, const SymmetryData& sym,
                              const SectionOrbitData& so,
                              const OracleOptions& opts) {
  const OutcomeBundle& b = na.bundle;
  const int d = na.dim;
  const int dd = d * d;
  const int m = b.measurements();
  const int omega = b.outcomes();
  const FiniteMatrixGroup& g = *sym.group;
  const int n = g.order();
  const double total = static_cast<double>(so.totalSections);
  std::vector<double> invNx(m);
  for (int x = 0; x < m; ++x) invNx[x] = b.fibreSizes[x] / total;

  const auto reps = static_cast<int>(so.representatives.size());
  std::vector<Section> repSec(reps);
  for (int r = 0; r < reps; ++r)
    repSec[r] = sectionFromIndex(b, so.representatives[r]);

  const OutcomeOrbitData od = orbitRepresentatives(na, sym);
  const auto classes = static_cast<int>(od.representatives.size());
  std::vector<int> transporter(omega, -1);
  for (int k = 0; k < classes; ++k)
    for (int gi = 0; gi < n; ++gi) {
      const int z = sym.outcomeAction.apply(gi, od.representatives[k]);
      if (transporter[z] < 0) transporter[z] = gi;
    }

  // kron(conj(U_g), U_g) realises X -> U_g X U_g^dagger on column-major vec.
  std::vector<CMat> kg(n);
  CMat sAll = CMat::Zero(dd, dd);
  for (int gi = 0; gi < n; ++gi) {
    const CMat& u = g.elements[gi];
    CMat k(dd, dd);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c)
        k.block(r * d, c * d, d, d) = std::conj(u(r, c)) * u;
    kg[gi] = std::move(k);
    sAll += kg[gi];
  }

  // transfer[k][r] maps vec(F_r) to its contribution to marg at outcome rep
  // k; stabOrder[r] = |G| / orbit size.
  std::vector<double> stabOrder(reps);
  for (int r = 0; r < reps; ++r)
    stabOrder[r] = static_cast<double>(n) / so.orbitSizes[r];
  std::vector<std::vector<CMat>> transfer(
      classes, std::vector<CMat>(reps, CMat::Zero(dd, dd)));
  for (int k = 0; k < classes; ++k) {
    const int z0 = od.representatives[k];
    const int x0 = b.measurementOf(z0);
    for (int r = 0; r < reps; ++r) {
      for (int gi = 0; gi < n; ++gi) {
        // [g(s)](x0) = g(s[g^{-1}(x0)]).
        const int xi = sym.measurementAction.apply(g.inv(gi), x0);
        const int moved =
            sym.outcomeAction.apply(gi, repSec[r].outcomes[xi]);
        if (moved == z0) transfer[k][r] += kg[gi];
      }
      transfer[k][r] /= stabOrder[r];
    }
  }

  const CMat one = identity(d);
  const CMat zero = CMat::Zero(d, d);
  const auto vecOf = [dd](const CMat& x) {
    return Eigen::Map<const CVec>(x.data(), dd);
  };
  const auto unvec = [d](const CVec& v) {
    return CMat(Eigen::Map<const CMat>(v.data(), d, d));
  };

  std::vector<CMat> f(reps), p(reps, zero), fa(reps);
  const double dPow = std::pow(static_cast<double>(d), m);
  for (int r = 0; r < reps; ++r) {
    double wgt = 1.0;
    for (int z : repSec[r].outcomes) wgt *= realTrace(na.effects[z]);
    f[r] = (wgt / dPow) * one;
  }

  // Outcomes that actually occur in representative sections need a delta.
  std::vector<char> occurs(omega, 0);
  for (const Section& s : repSec)
    for (int z : s.outcomes) occurs[z] = 1;

  std::vector<CMat> margRep(classes), delta(omega);
  DykstraOutcome out;
  for (int it = 1; it <= opts.iterationBudget; ++it) {
    CVec weighted = CVec::Zero(dd);
    for (int r = 0; r < reps; ++r)
      weighted += vecOf(f[r]) / stabOrder[r];
    const CMat mean = unvec(CVec(sAll * weighted)) / total;

    double margDef = 0.0;
    for (int k = 0; k < classes; ++k) {
      CVec mv = CVec::Zero(dd);
      for (int r = 0; r < reps; ++r) mv += transfer[k][r] * vecOf(f[r]);
      margRep[k] = unvec(mv);
      margDef = std::max(
          margDef, maxAbs(margRep[k] - na.effects[od.representatives[k]]));
    }

    const CMat shift = (m - 1) * (mean - one / total);
    for (int z = 0; z < omega; ++z) {
      if (!occurs[z]) continue;
      const int gi = transporter[z];
      const CMat margZ = g.elements[gi] * margRep[od.orbitOf[z]] *
                         g.elements[gi].adjoint();
      delta[z] = (na.effects[z] - margZ) * invNx[b.measurementOf(z)];
    }

    double psdDef = 0.0;
    for (int r = 0; r < reps; ++r) {
      fa[r] = f[r] + shift;
      for (int z : repSec[r].outcomes) fa[r] += delta[z];
      psdDef = std::max(psdDef, std::max(0.0, -minEigFast(fa[r])));
    }

    out.iterations = it;
    out.residual = std::max(psdDef, margDef);
    if (out.residual <= opts.tolerance) {
      out.verdict = OracleVerdict::Compatible;
      return out;
    }

    for (int r = 0; r < reps; ++r) {
      const CMat y = fa[r] + p[r];
      f[r] = projectPSD(y);
      p[r] = y - f[r];
    }
  }
  return out;
}

}  // namespace

OracleResult compatibilityOracle(const Assemblage& a, double eta,
                                 NoiseKind kind, const OracleOptions& opts) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    std::ostringstream os;
    os << "eta = " << eta << " outside [0, 1]";
    throw EtaOutOfRange(os.str());
  }

  SectionOrbitData so;
  bool reduced = false;
  if (opts.symmetry != nullptr) {
    checkSymmetry(a, *opts.symmetry);
    so = orbitRepresentatives(a.bundle, sectionSymmetryFrom(*opts.symmetry));
    if (so.representatives.size() > opts.sectionCap) {
      std::ostringstream os;
      os << so.representatives.size()
         << " section orbits exceed the cap " << opts.sectionCap;
      throw TooManySections(os.str());
    }
    reduced = true;
  } else if (a.bundle.sectionCount() > opts.sectionCap) {
    std::ostringstream os;
    os << a.bundle.sectionCount() << " sections exceed the cap "
       << opts.sectionCap;
    throw TooManySections(os.str());
  }

  OracleResult res;
  res.certifiedBound = std::numeric_limits<double>::quiet_NaN();
  std::string note;
  if (opts.certificatePrecheck) {
    try {
      // The complement family of `a` is the white family of its complement
      // assemblage, so both kinds reduce to one certificate computation.
      const Assemblage target =
          (kind == NoiseKind::White) ? a : complementAssemblage(a);
      RobustnessReport rep;
      rep.Z = normalizationConstantZ(target);
      rep.lambda = lambdaExhaustive(target, opts.scan);
      const DualCertificate cert = dualCertificate(target, rep, opts.scan);
      res.certifiedBound = cert.certifiedUpperBound;
      if (eta > cert.certifiedUpperBound + opts.tolerance) {
        res.verdict = OracleVerdict::Incompatible;
        std::ostringstream os;
        os << "dual certificate bound " << cert.certifiedUpperBound
           << " excludes eta = " << eta;
        res.note = os.str();
        return res;
      }
    } catch (const Error& e) {
      note = std::string("certificate precheck unavailable: ") + e.what();
    }
  }

  const Assemblage na = noisyAssemblage(a, eta, kind);
  const DykstraOutcome dy =
      reduced ? dykstraReduced(na, *opts.symmetry, so, opts)
              : dykstraUnreduced(na, opts);
  res.verdict = dy.verdict;
  res.iterations = dy.iterations;
  res.residual = dy.residual;
  if (dy.verdict == OracleVerdict::Compatible) {
    res.note = note.empty() ? "primal residual below tolerance"
                            : note + "; primal residual below tolerance";
  } else {
    res.note = note.empty() ? "iteration budget exhausted" : note;
  }
  return res;
}

}  // namespace symmetra
