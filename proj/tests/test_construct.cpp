#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <symmetra/construct.hpp>
#include <symmetra/errors.hpp>
#include <symmetra/incompat.hpp>
#include <symmetra/io.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "support/helpers.hpp"

using namespace symmetra;
using symtest::loadGroup;

namespace {

// Trine on the equatorial circle: three rank-one projections at 120 degrees.
std::vector<CMat> trineProjections() {
  std::vector<CMat> out;
  for (int k = 0; k < 3; ++k) {
    const double t = 2.0 * M_PI * k / 3.0;
    out.push_back(symtest::blochEffect(std::sin(t), 0.0, std::cos(t)));
  }
  return out;
}

}  // namespace

TEST_CASE("candidateStabilizers keeps exactly the two-irrep classes") {
  const GroupPtr g = loadGroup("binary_octahedral");
  const auto classes = candidateStabilizers(*g);
  CHECK_FALSE(classes.empty());
  for (const auto& c : classes) {
    CHECK(c.order > 1);
    CHECK(c.order < g->order());
    CHECK(countIrreducibleSubreps(*g, c.representative) == 2);
  }
  CHECK_THROWS_AS(candidateStabilizers(*g, 10), TooLarge);
}

TEST_CASE("isotypicProjection splits a cyclic stabiliser") {
  // diag(1, i) has the two isotypic projections diag(1,0) and diag(0,1).
  CMat ui(2, 2);
  ui << 1, 0, 0, Complex(0, 1);
  const FiniteMatrixGroup c4 = closeGenerators({ui});
  std::vector<int> all(c4.order());
  std::iota(all.begin(), all.end(), 0);
  const auto [p, q] = isotypicProjection(c4, all);
  CHECK(isProjection(p).isProjection);
  CHECK(maxAbs(p + q - CMat::Identity(2, 2)) <= 1e-10);
  CHECK(maxAbs(p * q) <= 1e-10);
  const bool firstIsE0 = std::abs(p(0, 0) - 1.0) <= 1e-9;
  const CMat& e0 = firstIsE0 ? p : q;
  CHECK(maxAbs(e0 - (CMat(2, 2) << 1, 0, 0, 0).finished()) <= 1e-9);
}

TEST_CASE("orbitOfProjection: octahedron orbit with action data") {
  const GroupPtr g = loadGroup("binary_octahedral");
  CMat p = CMat::Zero(2, 2);
  p(0, 0) = 1.0;  // +z eigenprojector: a vertex of the octahedron
  const ProjectionOrbit orbit = orbitOfProjection(*g, p);
  CHECK(orbit.elements.size() == 6);
  CHECK(orbit.stabilizer.size() == 8);
  CHECK(orbit.elements.size() * orbit.stabilizer.size() ==
        static_cast<size_t>(g->order()));
  REQUIRE(orbit.actionImages.size() == static_cast<size_t>(g->order()));
  // Every row is a permutation of the orbit consistent with conjugation.
  for (int gi = 0; gi < g->order(); ++gi) {
    std::set<int32_t> seen(orbit.actionImages[gi].begin(),
                           orbit.actionImages[gi].end());
    CHECK(seen.size() == orbit.elements.size());
    const CMat& u = g->elements[gi];
    for (size_t i = 0; i < orbit.elements.size(); i += 2) {
      const CMat moved = u * orbit.elements[i] * u.adjoint();
      CHECK(maxAbs(moved - orbit.elements[orbit.actionImages[gi][i]]) <=
            1e-8);
    }
  }
  // Stabiliser elements fix element 0.
  for (int s : orbit.stabilizer) CHECK(orbit.actionImages[s][0] == 0);
}

TEST_CASE("groupIntoMeasurements: projective blocks on the octahedron") {
  const GroupPtr g = loadGroup("binary_octahedral");
  CMat p = CMat::Zero(2, 2);
  p(0, 0) = 1.0;
  const ProjectionOrbit orbit = orbitOfProjection(*g, p);
  const Grouping grouping =
      groupIntoMeasurements(orbit.elements, GroupingMode::projectiveMode());
  CHECK(grouping.bundle.measurements() == 3);
  REQUIRE(grouping.blocks.size() == 3);
  for (const auto& block : grouping.blocks) {
    REQUIRE(block.size() == 2);
    CHECK(maxAbs(orbit.elements[block[0]] + orbit.elements[block[1]] -
                 CMat::Identity(2, 2)) <= 1e-9);
  }
}

TEST_CASE("groupIntoMeasurements: povm blocks rescale to the identity") {
  const auto trine = trineProjections();
  const Grouping grouping =
      groupIntoMeasurements(trine, GroupingMode::povm(3));
  CHECK(grouping.bundle.measurements() == 1);
  REQUIRE(grouping.blocks.size() == 1);
  CHECK(grouping.blocks[0] == std::vector<int>{0, 1, 2});
  CMat sum = CMat::Zero(2, 2);
  for (const auto& e : grouping.effects) sum += e;
  CHECK(maxAbs(sum - CMat::Identity(2, 2)) <= 1e-10);
  // Effects are the projections scaled by d / (n * rank) = 2/3.
  CHECK(maxAbs(grouping.effects[0] - (2.0 / 3.0) * trine[0]) <= 1e-10);
}

TEST_CASE("groupIntoMeasurements throws NoPartition when impossible") {
  CHECK_THROWS_AS(
      groupIntoMeasurements(trineProjections(), GroupingMode::povm(2)),
      NoPartition);
  CHECK_THROWS_AS(groupIntoMeasurements(trineProjections(),
                                        GroupingMode::projectiveMode()),
                  NoPartition);
}

TEST_CASE("covariantGroupings finds the block systems of the octahedron") {
  const GroupPtr g = loadGroup("binary_octahedral");
  CMat p = CMat::Zero(2, 2);
  p(0, 0) = 1.0;
  const ProjectionOrbit orbit = orbitOfProjection(*g, p);
  const auto systems = covariantGroupings(*g, orbit);
  // Discrete, antipodal pairs, and the single block; nothing else.
  REQUIRE(systems.size() == 3);
  std::multiset<size_t> blockCounts;
  for (const auto& sys : systems) {
    blockCounts.insert(sys.size());
    CHECK(verifyCovarianceOfGrouping(sys, orbit));
    size_t total = 0;
    for (const auto& b : sys) total += b.size();
    CHECK(total == orbit.elements.size());
  }
  CHECK(blockCounts == std::multiset<size_t>{1, 3, 6});
  // The 3-block system is the antipodal pairing.
  for (const auto& sys : systems) {
    if (sys.size() != 3) continue;
    for (const auto& b : sys) {
      REQUIRE(b.size() == 2);
      CHECK(maxAbs(orbit.elements[b[0]] + orbit.elements[b[1]] -
                   CMat::Identity(2, 2)) <= 1e-9);
    }
  }
}

TEST_CASE("non-covariant partitions are rejected") {
  const GroupPtr g = loadGroup("binary_octahedral");
  CMat p = CMat::Zero(2, 2);
  p(0, 0) = 1.0;
  const ProjectionOrbit orbit = orbitOfProjection(*g, p);
  // Find the antipode of 0 and build a partition pairing 0 with a
  // non-antipodal element instead.
  int antipode = -1;
  for (size_t i = 1; i < orbit.elements.size(); ++i)
    if (maxAbs(orbit.elements[0] + orbit.elements[i] -
               CMat::Identity(2, 2)) <= 1e-9)
      antipode = static_cast<int>(i);
  REQUIRE(antipode >= 0);
  std::vector<int> rest;
  for (int i = 1; i < 6; ++i)
    if (i != antipode) rest.push_back(i);
  REQUIRE(rest.size() == 4);
  const std::vector<std::vector<int>> crooked = {
      {0, rest[0]}, {rest[1], antipode}, {rest[2], rest[3]}};
  CHECK_FALSE(verifyCovarianceOfGrouping(crooked, orbit));
}

TEST_CASE("constructAssemblages: binary octahedral projective family") {
  const GroupPtr g = loadGroup("binary_octahedral");
  const ConstructionResult result =
      constructAssemblages(g, GroupingMode::projectiveMode());
  REQUIRE(result.assemblages.size() == 3);
  std::map<int, int> stabByM;
  for (const auto& c : result.assemblages) {
    stabByM[c.assemblage.bundle.measurements()] = c.stabilizerOrder;
    CHECK(c.assemblage.dim == 2);
    CHECK(checkNormalization(c.assemblage).ok);
    CHECK_NOTHROW(checkSymmetry(c.assemblage, c.symmetry));
    CHECK(isUniform(c.assemblage, c.symmetry));
    CHECK(isRigid(c.assemblage, c.symmetry).rigid);
  }
  REQUIRE(stabByM.size() == 3);
  CHECK(stabByM.at(3) == 8);   // octahedron
  CHECK(stabByM.at(4) == 6);   // cube
  CHECK(stabByM.at(6) == 4);   // cuboctahedron
}

TEST_CASE("constructed octahedron matches the shipped platonic solid") {
  const auto octa = symtest::constructedOctahedron();
  const Assemblage shipped = platonicAssemblage("octahedron");
  // Same closed-form robustness on both presentations.
  const RobustnessReport a =
      robustnessReport(octa.assemblage, &octa.symmetry, StatMethod::Exhaustive);
  const RobustnessReport b =
      robustnessReport(shipped, nullptr, StatMethod::Exhaustive);
  CHECK(a.alphaStar == doctest::Approx(b.alphaStar).epsilon(1e-10));
  CHECK(a.betaStar == doctest::Approx(b.betaStar).epsilon(1e-10));
  CHECK(a.formulaCertified);
  CHECK_FALSE(b.formulaCertified);  // no symmetry supplied
}

TEST_CASE("constructAssemblages: povm families of the binary octahedral") {
  const GroupPtr g = loadGroup("binary_octahedral");
  const ConstructionResult p3 = constructAssemblages(g, GroupingMode::povm(3));
  std::set<int> m3;
  for (const auto& c : p3.assemblages) {
    m3.insert(c.assemblage.bundle.measurements());
    CHECK(c.mode.povmSize == 3);
    CHECK(checkNormalization(c.assemblage).ok);
  }
  CHECK(m3.count(4) == 1);  // the cuboctahedron regrouped in triples

  const ConstructionResult p4 = constructAssemblages(g, GroupingMode::povm(4));
  std::set<int> m4;
  for (const auto& c : p4.assemblages)
    m4.insert(c.assemblage.bundle.measurements());
  CHECK(m4.count(2) == 1);
  CHECK(m4.count(3) == 1);
}

TEST_CASE("constructAssemblages: the ST25 group yields the d = 3 MUB") {
  const GroupPtr g = loadGroup("st25");
  const ConstructionResult result =
      constructAssemblages(g, GroupingMode::projectiveMode());
  REQUIRE(result.assemblages.size() == 1);
  const auto& c = result.assemblages[0];
  CHECK(c.assemblage.dim == 3);
  CHECK(c.assemblage.bundle.measurements() == 4);
  CHECK(c.stabilizerOrder == 54);
  // Mutually unbiased: cross-basis overlaps all equal 1/3.
  const Assemblage& a = c.assemblage;
  for (int z = 0; z < a.bundle.outcomes(); ++z)
    for (int w = z + 1; w < a.bundle.outcomes(); ++w) {
      if (a.bundle.measurementOf(z) == a.bundle.measurementOf(w)) continue;
      const double overlap = std::real((a.effects[z] * a.effects[w]).trace());
      CHECK(overlap == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
    }
}

TEST_CASE("eigenvectorProjectionOrbits reaches the ST27 orbits") {
  const GroupPtr g = loadGroup("st27");
  REQUIRE(g->order() == 2160);
  const auto orbits = eigenvectorProjectionOrbits(g);
  std::multiset<size_t> sizes;
  for (const auto& o : orbits) {
    sizes.insert(o.elements.size());
    CHECK(o.elements.size() * o.stabilizer.size() ==
          static_cast<size_t>(g->order()));
  }
  CHECK(sizes == std::multiset<size_t>{36, 45, 60, 60, 72});

  // The orbits regroup into the reference measurement families.
  std::set<int> projectiveM, povm6M, povm4M;
  for (const auto& o : orbits) {
    ConstructionResult res;
    assemblagesFromOrbit(g, o, GroupingMode::projectiveMode(), res);
    for (const auto& c : res.assemblages)
      projectiveM.insert(c.assemblage.bundle.measurements());
    ConstructionResult res6;
    assemblagesFromOrbit(g, o, GroupingMode::povm(6), res6);
    for (const auto& c : res6.assemblages)
      povm6M.insert(c.assemblage.bundle.measurements());
    ConstructionResult res4;
    assemblagesFromOrbit(g, o, GroupingMode::povm(4), res4);
    for (const auto& c : res4.assemblages)
      povm4M.insert(c.assemblage.bundle.measurements());
  }
  CHECK(projectiveM.count(15) == 1);
  CHECK(projectiveM.count(20) == 1);
  CHECK(povm6M.count(6) == 1);
  CHECK(povm6M.count(10) == 1);
  CHECK(povm4M.count(15) == 1);
}

TEST_CASE("platonicAssemblage shapes and normalization") {
  const std::map<std::string, int> expected = {
      {"octahedron", 3},     {"cube", 4},
      {"cuboctahedron", 6},  {"icosahedron", 6},
      {"dodecahedron", 10},  {"icosidodecahedron", 15}};
  for (const auto& [solid, m] : expected) {
    const Assemblage a = platonicAssemblage(solid);
    CHECK(a.dim == 2);
    CHECK(a.bundle.measurements() == m);
    for (int x = 0; x < m; ++x) CHECK(a.bundle.fibreSizes[x] == 2);
    CHECK(checkNormalization(a, 1e-9).ok);
    // Dichotomic effects are rank-one projections (unit Bloch vectors).
    for (const auto& e : a.effects) CHECK(isProjection(e, 1e-8).isProjection);
  }
  CHECK_THROWS_AS(platonicAssemblage("tetrahedron"), SchemaMismatch);
}

TEST_CASE("grouping mode labels") {
  CHECK(GroupingMode::projectiveMode().label() == "projective");
  CHECK(GroupingMode::povm(4).label() == "povm(4)");
}
