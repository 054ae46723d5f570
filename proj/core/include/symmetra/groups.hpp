#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "symmetra/numerics.hpp"

namespace symmetra {

// Lookup key for a matrix: entries rounded to multiples of `quantum` and
// packed into a string.  Two matrices closer than ~quantum/2 entrywise share
// a key; exact confirmation is always performed on top of key equality.
std::string quantizedKey(const CMat& m, double quantum = 1e-8);

// A finite group of unitaries given by an explicit element list plus
// multiplication / inverse tables (indices into `elements`).
struct FiniteMatrixGroup {
  int dim = 0;
  std::vector<CMat> elements;
  int identityIndex = 0;
  std::vector<int32_t> multTable;  // flat, multTable[a * order + b]
  std::vector<int32_t> invTable;
  std::vector<int> generatorIndices;
  // True when the element matrices represent the abstract group only up to
  // phases (the multiplication table is authoritative, characters are not).
  bool projective = false;

  int order() const { return static_cast<int>(elements.size()); }
  int mult(int a, int b) const {
    return multTable[static_cast<size_t>(a) * elements.size() + b];
  }
  int inv(int a) const { return invTable[a]; }
  std::string elementKey(int i, double quantum = 1e-8) const;
  // Index of the element matching m by quantized key (-1 when absent).
  int indexOf(const CMat& m, double quantum = 1e-8) const;

  // Key -> index map, built lazily by the factory functions.
  std::unordered_map<std::string, int> keyToIndex;
};

using GroupPtr = std::shared_ptr<const FiniteMatrixGroup>;

// Closure of a finite set of unitaries under multiplication.  Throws
// NotUnitary when a generator is not unitary and OrderExceeded when the
// closure grows beyond maxOrder.  Element discovery uses quantized keys; the
// multiplication table is confirmed against exact products afterwards.
FiniteMatrixGroup closeGenerators(const std::vector<CMat>& generators,
                                  int maxOrder = 100000);

// Group from an explicit element list whose pairwise products all lie in the
// list (up to key quantization).  Used when the closure is already known.
FiniteMatrixGroup makeGroupFromElements(std::vector<CMat> elements,
                                        std::vector<int> generatorIndices);

// Group from an abstract multiplication table.  The matrices may realise the
// table only projectively; this is detected and recorded in `projective`.
FiniteMatrixGroup makeGroupFromTable(std::vector<CMat> elements,
                                     std::vector<int32_t> multTable,
                                     std::vector<int> generatorIndices);

// Conjugacy class of subgroups, named by one representative.
struct SubgroupClass {
  std::vector<int> representative;  // sorted element indices
  int order = 0;                    // |H|
  int classSize = 0;                // number of conjugates
};

// All conjugacy classes of subgroups via representative-extension search:
// every subgroup K equals <H, g> for a maximal H < K and some g of prime
// power order, so extending class representatives by prime-power-order
// elements reaches every class.  Throws TooLarge when the group order
// exceeds orderCap.
std::vector<SubgroupClass> enumerateSubgroupClasses(const FiniteMatrixGroup& g,
                                                    int orderCap = 5000);

// A permutation action of a group on {0, ..., points-1}.
struct PermAction {
  GroupPtr group;
  int points = 0;
  std::vector<int32_t> images;  // flat, images[g * points + s]

  int apply(int g, int s) const {
    return images[static_cast<size_t>(g) * points + s];
  }
};

// Validates that every row is a permutation and the rows compose according
// to the group multiplication table.
PermAction makePermAction(GroupPtr group, std::vector<int32_t> flatImages,
                          int points);

// Orbits of an action, each sorted ascending; orbits ordered by least point.
std::vector<std::vector<int>> orbits(const PermAction& action);

// Stabiliser subgroup (element indices) of a point.
std::vector<int> stabilizer(const PermAction& action, int point);

// Orthonormal (Frobenius) basis of { X : X U = U X for all U }.  `dim` is
// required when `unitaries` is empty (the answer is then the full matrix
// space).  Uses the eigen-nullspace of sum_U K_U^dagger K_U with
// K_U = I (x) U - U^T (x) I acting on column-major vec(X).
std::vector<CMat> commutantBasis(const std::vector<CMat>& unitaries,
                                 int dim = -1);

// Character norm <chi, chi> = (1/|H|) sum_h |Tr U_h|^2 of the restriction of
// the defining representation to the subgroup given by element indices,
// rounded to the nearest integer.  Equals the sum of squared multiplicities
// of the irreducible subrepresentations (2 iff two inequivalent irreps each
// of multiplicity one).  Throws ProjectivePhases for projective groups,
// whose characters are not well defined.
int countIrreducibleSubreps(const FiniteMatrixGroup& g,
                            const std::vector<int>& subgroup);

}  // namespace symmetra
