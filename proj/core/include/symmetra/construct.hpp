#pragma once

#include <string>
#include <utility>
#include <vector>

#include "symmetra/bundle.hpp"
#include "symmetra/groups.hpp"

namespace symmetra {

// How an orbit of projections is grouped into measurements: either disjoint
// blocks of orthogonal projections summing to the identity (projective) or
// blocks of a fixed size whose rescaled sum is the identity (povm).
struct GroupingMode {
  bool projective = true;
  int povmSize = 0;  // block size when projective == false

  static GroupingMode projectiveMode() { return GroupingMode{true, 0}; }
  static GroupingMode povm(int n) { return GroupingMode{false, n}; }

  std::string label() const;
};

// Conjugacy classes of subgroups whose restriction of the defining
// representation splits into exactly two irreducible pieces (each of
// multiplicity one): exactly the stabiliser candidates whose commutant is
// spanned by a projection and its complement.  Trivial subgroup and the
// full group are excluded.  Throws TooLarge when the group order exceeds
// orderCap.
std::vector<SubgroupClass> candidateStabilizers(const FiniteMatrixGroup& g,
                                                int orderCap = 5000);

// The two complementary isotypic projections (P, 1 - P) of a subgroup with
// exactly two irreducible subrepresentations, obtained by splitting the
// spectrum of a random Hermitian element of the subgroup commutant at its
// largest eigenvalue gap.  Deterministic (fixed seed).
std::pair<CMat, CMat> isotypicProjection(const FiniteMatrixGroup& g,
                                         const std::vector<int>& subgroup);

// Orbit of a projection under conjugation, with the permutation action of
// every group element on the orbit and the stabiliser of element 0.
struct ProjectionOrbit {
  std::vector<CMat> elements;
  std::vector<int> stabilizer;                  // indices fixing elements[0]
  std::vector<std::vector<int32_t>> actionImages;  // [g][i] -> orbit index
};
ProjectionOrbit orbitOfProjection(const FiniteMatrixGroup& g, const CMat& p,
                                  double tol = 1e-8);

// One grouping of an orbit into measurements: blocks[y] lists the orbit
// indices forming fibre y, in ascending order; effects are the (rescaled)
// orbit elements laid out block by block.
struct Grouping {
  OutcomeBundle bundle;
  std::vector<CMat> effects;
  std::vector<std::vector<int>> blocks;
};

// First grouping of the orbit compatible with the mode, found by exact-cover
// backtracking in canonical order (each block seeded at the lowest unused
// index).  Throws NoPartition when none exists.
Grouping groupIntoMeasurements(const std::vector<CMat>& orbit,
                               const GroupingMode& mode, double tol = 1e-8);

// Whether every group element permutes the blocks among themselves.
bool verifyCovarianceOfGrouping(const std::vector<std::vector<int>>& blocks,
                                const ProjectionOrbit& orbit);

// All partitions of the orbit preserved by the group action (block systems
// of the permutation action generated by actionImages restricted to the
// group generators), including the discrete and the single-block partition.
// Each partition lists blocks sorted by least member.
std::vector<std::vector<std::vector<int>>> covariantGroupings(
    const FiniteMatrixGroup& g, const ProjectionOrbit& orbit);

// A constructed assemblage together with its symmetry data and provenance.
struct ConstructedAssemblage {
  Assemblage assemblage;
  SymmetryData symmetry;
  GroupingMode mode;
  int stabilizerOrder = 0;
  std::string key;  // canonical fingerprint used for deduplication
};

struct ConstructionResult {
  std::vector<ConstructedAssemblage> assemblages;
  std::vector<std::string> rejected;  // human-readable reasons
};

// Appends every assemblage obtainable from the orbit under the mode: each
// covariant grouping with the right block size and identity block sums is
// packaged with its symmetry data and kept when uniform and rigid.
// Duplicates of already-present assemblages are skipped.
void assemblagesFromOrbit(const GroupPtr& g, const ProjectionOrbit& orbit,
                          const GroupingMode& mode, ConstructionResult& out);

// Full construction: enumerate stabiliser candidates, split isotypic
// projections, expand orbits, and group each orbit in all covariant ways.
// Deterministic; result sorted by (measurement count, outcome count, key).
ConstructionResult constructAssemblages(const GroupPtr& g,
                                        const GroupingMode& mode,
                                        int orderCap = 5000);

// Projection orbits seeded from non-degenerate eigenvectors of the group
// elements themselves; reaches rank-one orbits of groups whose subgroup
// lattice is too large to enumerate.  Orbits are returned in discovery
// order (elements scanned by index).
std::vector<ProjectionOrbit> eigenvectorProjectionOrbits(const GroupPtr& g,
                                                         double tol = 1e-8);

// Qubit assemblage of a platonic solid: one dichotomic measurement
// (1 +- n.sigma)/2 per listed Bloch vector of the solid.
Assemblage platonicAssemblage(const std::string& solid);

}  // namespace symmetra
