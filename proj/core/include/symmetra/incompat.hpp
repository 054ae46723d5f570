#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "symmetra/bundle.hpp"

namespace symmetra {

enum class NoiseKind { White, Complement };

// Noisy assemblage: white kind mixes every effect with Tr(A_z) 1/d; the
// complement kind mixes with the complement effect (Tr(A_z) 1 - A_z)/(d-1).
// Throws EtaOutOfRange unless 0 <= eta <= 1.
Assemblage noisyAssemblage(const Assemblage& a, double eta, NoiseKind kind);

// The eta = 1 complement assemblage (Tr(A_z) 1 - A_z)/(d-1).  Complement
// noise on `a` at eta equals white noise on complementAssemblage(a) at eta.
Assemblage complementAssemblage(const Assemblage& a);

// Z = sum_z Tr A_z^2 - d |M|^2 / |Omega|; equals (d-1)|M| for rank-one
// projective assemblages.  Requires constant effect trace d|M|/|Omega|
// (throws NotUniform otherwise).
double normalizationConstantZ(const Assemblage& a);

enum class StatMethod { Exhaustive, Greedy };
enum class BoundKind { Exact, LowerBound, UpperBound };

struct SectionStatistic {
  double value = 0.0;
  Section section;
  StatMethod method = StatMethod::Exhaustive;
  BoundKind boundDirection = BoundKind::Exact;
};

struct ScanOptions {
  uint64_t sectionCap = 100000000ULL;
  int threads = 1;
};

// lambda = max over sections of maxEig(sum_x A_{s(x)}); mu = min over
// sections of minEig.  Throws TooManySections above the cap.  The scans are
// deterministic: on exact value ties the smallest section index wins.
SectionStatistic lambdaExhaustive(const Assemblage& a,
                                  const ScanOptions& opts = {});
SectionStatistic muExhaustive(const Assemblage& a, const ScanOptions& opts = {});

// Greedy heuristics: grow a section from (measurement 0, outcome 0) by
// repeatedly adding the (measurement, outcome) pair with the extremal running
// eigenvalue; exact-value ties break towards the lowest (measurement,
// outcome).  lambdaGreedy lower-bounds lambda; muGreedy upper-bounds mu.
SectionStatistic lambdaGreedy(const Assemblage& a);
SectionStatistic muGreedy(const Assemblage& a);

// Closed forms alpha* = (d/Z)(lambda - |M|^2/|Omega|) and
// beta* = (d(d-1)/Z)(|M|^2/|Omega| - mu).  Pure formulas; certification of
// their optimality (uniform + rigid) is tracked by the report builder.
double alphaStar(const Assemblage& a, double z, const SectionStatistic& lambda);
double betaStar(const Assemblage& a, double z, const SectionStatistic& mu);

struct RobustnessReport {
  double Z = 0.0;
  SectionStatistic lambda;
  SectionStatistic mu;
  double alphaStar = 0.0;
  double betaStar = 0.0;
  bool rankOneProjective = false;
  // Exact when the underlying statistic is exhaustive; bounds otherwise.
  BoundKind alphaBound = BoundKind::Exact;
  BoundKind betaBound = BoundKind::Exact;
  // True when uniformity + rigidity were verified for the supplied symmetry,
  // which is what makes the closed forms the exact thresholds.
  bool formulaCertified = false;
  std::string certificationNote;
};

// Convenience composer: Z + both statistics + closed forms.  When `sym` is
// supplied, uniformity and rigidity are checked and recorded; otherwise the
// report carries a "formula not certified" note.  mu = 0 found by the greedy
// is promoted to exact (section sums are PSD, so mu >= 0 always).
RobustnessReport robustnessReport(const Assemblage& a,
                                  const SymmetryData* sym, StatMethod method,
                                  const ScanOptions& opts = {});

// Throws NotUniformOrRigid unless the report certified the closed forms.
// The report itself never throws: the values stay available with the flag.
void requireCertified(const RobustnessReport& rep);

struct DualCertificate {
  double a = 0.0, b = 0.0;          // X_z = a 1 + b A_z
  std::vector<CMat> perOutcome;
  double firstConstraint = 0.0;     // |saturation defect| of Eq. firstcond
  double worstSectionMinEig = 0.0;  // min over sections of minEig(sum X)
  double certifiedUpperBound = 0.0;
  bool feasible = false;
};

// Dual certificate X_z = (1/Z)(lambda/|M| 1 - A_z).  Requires an exact
// lambda (an exhaustive scan is attempted when the report carries only a
// greedy bound); throws InfeasibleCertificate when the residuals exceed
// tolerance or no exact lambda is available.
DualCertificate dualCertificate(const Assemblage& a,
                                const RobustnessReport& rep,
                                const ScanOptions& opts = {});

// Antiunitary symmetry z -> tau(z) realised by A_{tau(z)} = W A_z^T W^dagger
// with W unitary; used to shrink section orbits further.
struct AntiunitaryInvolution {
  CMat w;
};

struct ReducedPrimal {
  SectionOrbitData sections;        // variables: one per section orbit
  OutcomeOrbitData outcomes;        // constraints: one per outcome orbit
  std::vector<uint64_t> outcomeWeights;  // |G| / |G_z| per outcome orbit
  double reconstructionDefect = 0.0;     // group-averaging check on effects
};

// Symmetry reduction of the primal: section-orbit representatives as
// variables and outcome-orbit representatives as constraints.  Validates the
// symmetry first (NotSymmetric) and the section count (TooManySections).
ReducedPrimal reduceBySymmetry(const Assemblage& a, const SymmetryData& s,
                               const AntiunitaryInvolution* involution = nullptr,
                               uint64_t sectionCap = 100000000ULL);

enum class OracleVerdict { Compatible, Incompatible, Inconclusive };

struct OracleOptions {
  int iterationBudget = 200000;
  double tolerance = 1e-7;
  // Maximum number of primal variables (sections, or section orbits when
  // symmetry is supplied).
  uint64_t sectionCap = 100000;
  bool certificatePrecheck = true;
  const SymmetryData* symmetry = nullptr;
  ScanOptions scan;  // used by the certificate precheck
};

struct OracleResult {
  OracleVerdict verdict = OracleVerdict::Inconclusive;
  int iterations = 0;
  double residual = 0.0;
  // Upper bound on the compatibility threshold from the dual certificate
  // precheck; NaN when the precheck was skipped.
  double certifiedBound = 0.0;
  std::string note;
};

// First-order compatibility oracle: Dykstra alternating projections between
// the affine marginal subspace (closed-form projection) and the PSD product
// cone, starting from the product-weights point.  With symmetry supplied the
// iteration runs on section-orbit representatives with equivariant marginal
// transfer maps.  "Incompatible" only ever comes from the dual certificate.
OracleResult compatibilityOracle(const Assemblage& a, double eta,
                                 NoiseKind kind,
                                 const OracleOptions& opts = {});

}  // namespace symmetra
