#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <symmetra/bundle.hpp>
#include <symmetra/construct.hpp>
#include <symmetra/errors.hpp>

#include <algorithm>
#include <set>

#include "support/helpers.hpp"

using namespace symmetra;

TEST_CASE("bundle index arithmetic round-trips") {
  const OutcomeBundle b = OutcomeBundle::fromFibreSizes({2, 3, 2});
  CHECK(b.measurements() == 3);
  CHECK(b.outcomes() == 7);
  for (int z = 0; z < b.outcomes(); ++z) {
    const int x = b.measurementOf(z);
    CHECK(b.globalIndex(x, b.localIndex(z)) == z);
  }
  CHECK(b.measurementOf(0) == 0);
  CHECK(b.measurementOf(2) == 1);
  CHECK(b.measurementOf(5) == 2);
  CHECK(b.sectionCount() == 12);
}

TEST_CASE("sectionCount saturates instead of overflowing") {
  const OutcomeBundle b =
      OutcomeBundle::fromFibreSizes(std::vector<int>(40, 4));  // 4^40 > 2^63
  CHECK(b.sectionCount() == (uint64_t{1} << 63));
  // Saturated counts still trip any realistic cap.
  CHECK_THROWS_AS(enumerateSections(b, uint64_t{1} << 62), TooManySections);
}

TEST_CASE("section enumeration, indexing, and iteration agree") {
  const OutcomeBundle b = OutcomeBundle::fromFibreSizes({2, 3, 2});
  const auto sections = enumerateSections(b);
  REQUIRE(sections.size() == 12);
  // Lexicographic: measurement 0 slowest.
  CHECK(sections[0].outcomes == std::vector<int>{0, 2, 5});
  CHECK(sections[1].outcomes == std::vector<int>{0, 2, 6});
  CHECK(sections[11].outcomes == std::vector<int>{1, 4, 6});
  for (uint64_t i = 0; i < sections.size(); ++i) {
    CHECK(sectionFromIndex(b, i) == sections[i]);
    CHECK(indexOfSection(b, sections[i]) == i);
  }
  SectionIterator it(b);
  Section s;
  uint64_t count = 0;
  while (it.next(s)) {
    CHECK(s == sections[count]);
    ++count;
  }
  CHECK(count == 12);

  // Sub-range iteration.
  SectionIterator mid(b, 5, 8);
  std::vector<Section> got;
  while (mid.next(s)) got.push_back(s);
  REQUIRE(got.size() == 3);
  CHECK(got[0] == sections[5]);
  CHECK(got[2] == sections[7]);

  CHECK_THROWS_AS(enumerateSections(b, 5), TooManySections);
}

TEST_CASE("checkNormalization accepts the octahedron and flags breakage") {
  Assemblage octa = platonicAssemblage("octahedron");
  CHECK(octa.dim == 2);
  CHECK(octa.bundle.measurements() == 3);
  const NormalizationReport ok = checkNormalization(octa);
  CHECK(ok.ok);
  CHECK(ok.worstFibreDefect <= 1e-12);
  CHECK(ok.worstEffectMinEig >= -1e-12);

  octa.effects[0] *= 1.01;  // fibre sum off by 1%
  const NormalizationReport bad = checkNormalization(octa);
  CHECK_FALSE(bad.ok);
  CHECK(bad.worstFibreDefect >= 4e-3);

  Assemblage neg = platonicAssemblage("octahedron");
  neg.effects[0] -= 0.01 * CMat::Identity(2, 2);
  neg.effects[1] += 0.01 * CMat::Identity(2, 2);
  const NormalizationReport negRep = checkNormalization(neg);
  CHECK_FALSE(negRep.ok);
  CHECK(negRep.worstEffectMinEig <= -5e-3);
}

TEST_CASE("makeSymmetryData validates covariance") {
  const auto ex = symtest::basisMeasurementExample();
  CHECK(ex.sym.group->order() == 8);
  CHECK_NOTHROW(checkSymmetry(ex.assemblage, ex.sym));

  // Tampering with an image breaks covariance.
  std::vector<int32_t> images =
      symtest::recoverOutcomeImages(ex.assemblage, *ex.sym.group);
  REQUIRE_FALSE(images.empty());
  // Find an element that swaps the outcomes and claim it fixes them.
  for (size_t g = 0; g < images.size() / 2; ++g) {
    if (images[2 * g] == 1) {
      images[2 * g] = 0;
      images[2 * g + 1] = 1;
      break;
    }
  }
  // Depending on which element was tampered with, either the permutation
  // table composition check or the covariance check fires; both are errors.
  CHECK_THROWS_AS(
      makeSymmetryData(ex.assemblage, ex.sym.group, std::move(images)), Error);
}

TEST_CASE("uniformity and rigidity of the basis-measurement example") {
  const auto ex = symtest::basisMeasurementExample();
  CHECK(isUniform(ex.assemblage, ex.sym));
  const RigidityReport rig = isRigid(ex.assemblage, ex.sym);
  CHECK(rig.rigid);
  REQUIRE(rig.representatives.size() == 1);  // one outcome orbit
  CHECK(rig.commutantDims == std::vector<int>{2});
  // Stabiliser {+-1, +-Z} restricts to two distinct characters.
  CHECK(rig.charNorms == std::vector<int>{2});
  CHECK(rig.worstSpanDefect <= 1e-9);
  CHECK(rig.worstProjectionDefect <= 1e-9);
}

TEST_CASE("rigidity fails when the stabiliser commutant is too big") {
  // Same assemblage, but only the order-2 group {1, X}: the stabiliser of
  // outcome 0 is trivial, so its commutant is the full matrix algebra.
  const auto ex = symtest::basisMeasurementExample();
  GroupPtr small = std::make_shared<const FiniteMatrixGroup>(
      closeGenerators({symtest::pauliX()}));
  REQUIRE(small->order() == 2);
  auto images = symtest::recoverOutcomeImages(ex.assemblage, *small);
  const SymmetryData sym =
      makeSymmetryData(ex.assemblage, small, std::move(images));
  CHECK(isUniform(ex.assemblage, sym));  // X still swaps the outcomes
  const RigidityReport rig = isRigid(ex.assemblage, sym);
  CHECK_FALSE(rig.rigid);
  CHECK(rig.commutantDims == std::vector<int>{4});
}

TEST_CASE("section action composes and preserves indices") {
  const auto octa = symtest::constructedOctahedron();
  const Assemblage& a = octa.assemblage;
  const SymmetryData& s = octa.symmetry;
  const OutcomeBundle& b = a.bundle;
  const int n = s.group->order();
  for (int g = 0; g < n; g += 7) {
    for (uint64_t idx = 0; idx < b.sectionCount(); idx += 3) {
      const Section sec = sectionFromIndex(b, idx);
      const Section moved = sectionAction(s, g, sec);
      // The action lands on a valid section and matches the index action.
      CHECK(indexOfSection(b, moved) == sectionIndexAction(b, s, g, idx));
      for (int x = 0; x < b.measurements(); ++x)
        CHECK(b.measurementOf(moved.outcomes[x]) == x);
    }
  }
  // Identity acts trivially.
  const Section sec = sectionFromIndex(b, 5);
  CHECK(sectionAction(s, s.group->identityIndex, sec) == sec);
}

TEST_CASE("outcome orbits of the octahedron") {
  const auto octa = symtest::constructedOctahedron();
  const OutcomeOrbitData data =
      orbitRepresentatives(octa.assemblage, octa.symmetry);
  // The symmetry is transitive on all six outcomes.
  REQUIRE(data.representatives.size() == 1);
  CHECK(data.representatives[0] == 0);
  CHECK(data.orbitSizes[0] == 6);
  for (int z = 0; z < 6; ++z) CHECK(data.orbitOf[z] == 0);
}

TEST_CASE("section orbits of the octahedron collapse to one") {
  const auto octa = symtest::constructedOctahedron();
  const SectionSymmetry gens = sectionSymmetryFrom(octa.symmetry);
  const SectionOrbitData data =
      orbitRepresentatives(octa.assemblage.bundle, gens);
  CHECK(data.totalSections == 8);
  CHECK(data.representatives.size() == 1);
  CHECK(data.orbitSizes[0] == 8);
}

TEST_CASE("section orbit sizes always divide up the section count") {
  const auto octa = symtest::constructedOctahedron();
  const SectionSymmetry gens = sectionSymmetryFrom(octa.symmetry);
  const SectionOrbitData data =
      orbitRepresentatives(octa.assemblage.bundle, gens);
  uint64_t total = 0;
  for (uint64_t s : data.orbitSizes) total += s;
  CHECK(total == data.totalSections);
}
