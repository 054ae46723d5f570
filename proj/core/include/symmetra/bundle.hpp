#pragma once

#include <cstdint>
#include <vector>

#include "symmetra/groups.hpp"

namespace symmetra {

// Discrete outcome bundle: a finite set of measurements, each with its own
// fibre of outcomes.  Outcomes carry a single global index; measurementOf is
// the bundle projection.
struct OutcomeBundle {
  std::vector<int> fibreSizes;
  std::vector<int> fibreOffsets;  // size measurements()+1, prefix sums

  int measurements() const { return static_cast<int>(fibreSizes.size()); }
  int outcomes() const { return fibreOffsets.back(); }
  int measurementOf(int z) const;
  int localIndex(int z) const { return z - fibreOffsets[measurementOf(z)]; }
  int globalIndex(int x, int local) const { return fibreOffsets[x] + local; }
  // Number of sections (choice functions), saturating at 2^63.
  uint64_t sectionCount() const;

  static OutcomeBundle fromFibreSizes(std::vector<int> sizes);
};

// A section assigns to every measurement one outcome of its fibre; stored as
// global outcome indices.
struct Section {
  std::vector<int> outcomes;
  bool operator==(const Section& o) const { return outcomes == o.outcomes; }
};

// An assemblage: one PSD effect per outcome, each fibre summing to the
// identity.
struct Assemblage {
  int dim = 0;
  OutcomeBundle bundle;
  std::vector<CMat> effects;  // by global outcome index

  const CMat& effect(int z) const { return effects[z]; }
};

struct NormalizationReport {
  bool ok = false;
  double worstFibreDefect = 0.0;   // max-abs deviation of a fibre sum from 1
  double worstEffectMinEig = 0.0;  // most negative effect eigenvalue (>= 0 ok)
  double worstHermDefect = 0.0;
};
NormalizationReport checkNormalization(const Assemblage& a,
                                       double tol = kHermTol);

// Symmetry of an assemblage: a unitary group together with its permutation
// action on outcomes (and the induced action on measurements).
struct SymmetryData {
  GroupPtr group;
  PermAction outcomeAction;
  PermAction measurementAction;
};

// Verifies covariance A_{g(z)} = U_g A_z U_g^dagger for all generators (which
// extends to the whole group by composition) and that the outcome action maps
// fibres to fibres; returns the induced measurement action.  Throws
// NotSymmetric on failure.
PermAction checkCovariance(const Assemblage& a, const GroupPtr& group,
                           const PermAction& outcomeAction,
                           double tol = 1e-8);

// Builds SymmetryData from flat outcome images, validating everything.
SymmetryData makeSymmetryData(const Assemblage& a, GroupPtr group,
                              std::vector<int32_t> outcomeImages,
                              double tol = 1e-8);

// Normalization + covariance + consistency of the stored measurement action.
// Throws InvariantViolation / NotSymmetric.
void checkSymmetry(const Assemblage& a, const SymmetryData& s,
                   double tol = 1e-8);

// Uniform: the group acts transitively on all outcomes.
bool isUniform(const Assemblage& a, const SymmetryData& s);

// Rigidity: for one representative per outcome orbit, the commutant of the
// stabiliser unitaries is two dimensional and spanned by a projection and its
// complement, with the effect proportional to that projection.
struct RigidityReport {
  bool rigid = false;
  std::vector<int> representatives;   // one outcome per orbit
  std::vector<int> commutantDims;
  std::vector<int> charNorms;         // -1 when the rep is projective
  double worstSpanDefect = 0.0;       // basis distance to span{1, A_z}
  double worstProjectionDefect = 0.0; // |A^2 - c A| for the scaled projection
};
RigidityReport isRigid(const Assemblage& a, const SymmetryData& s,
                       double tol = 1e-7);

// ---------------------------------------------------------------- sections

// Streams sections in lexicographic order (measurement 0 slowest).
class SectionIterator {
 public:
  SectionIterator(const OutcomeBundle& b, uint64_t first, uint64_t last);
  explicit SectionIterator(const OutcomeBundle& b);
  // Writes the next section and returns true, or returns false when done.
  bool next(Section& out);
  uint64_t index() const { return next_; }  // index of the section next() yields

 private:
  const OutcomeBundle* bundle_;
  uint64_t next_ = 0, last_ = 0;
};

// Materialises all sections; throws TooManySections above cap.
std::vector<Section> enumerateSections(const OutcomeBundle& b,
                                       uint64_t cap = 1000000);

Section sectionFromIndex(const OutcomeBundle& b, uint64_t index);
uint64_t indexOfSection(const OutcomeBundle& b, const Section& s);

// Group action on sections: [g(s)](x) = g(s[g^{-1}(x)]).
Section sectionAction(const SymmetryData& s, int g, const Section& sec);
uint64_t sectionIndexAction(const OutcomeBundle& b, const SymmetryData& s,
                            int g, uint64_t index);

// Orbit decomposition of the outcome set; representatives are the least
// outcome of each orbit, listed in increasing order.
struct OutcomeOrbitData {
  std::vector<int> representatives;
  std::vector<int> orbitSizes;
  std::vector<int> orbitOf;  // outcome -> orbit id
};
OutcomeOrbitData orbitRepresentatives(const Assemblage& a,
                                      const SymmetryData& s);

// Orbit decomposition of the section set under a list of generating
// permutations (usually the symmetry group generators, optionally extended
// by an antiunitary involution).  Representatives are the least section
// index per orbit.
struct SectionSymmetry {
  std::vector<std::vector<int32_t>> outcomePerms;
  std::vector<std::vector<int32_t>> measurementPerms;
};
SectionSymmetry sectionSymmetryFrom(const SymmetryData& s);

struct SectionOrbitData {
  std::vector<uint64_t> representatives;
  std::vector<uint64_t> orbitSizes;
  uint64_t totalSections = 0;
};
SectionOrbitData orbitRepresentatives(const OutcomeBundle& b,
                                      const SectionSymmetry& gens,
                                      uint64_t cap = 100000000ULL);

}  // namespace symmetra
