#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "symmetra/bundle.hpp"

namespace symmetra {

// Resolution order for the shipped data directory: $SYMMETRA_DATA_DIR, the
// source-tree data directory baked in at configure time, a share/symmetra/data
// directory next to the running executable, then ./data.
std::string dataDir();
// Joins onto dataDir(); throws SchemaMismatch when the file does not exist.
std::string dataFile(const std::string& relative);

// --------------------------------------------------------------- documents
// All document functions speak JSON through plain strings; parsing lives in
// the implementation only.

std::string exportAssemblage(const Assemblage& a, const std::string& name);

struct ImportedAssemblage {
  Assemblage assemblage;
  std::string name;
};
ImportedAssemblage importAssemblage(const std::string& json);
ImportedAssemblage readAssemblageFile(const std::string& path);

// Group files hold generators; the group is closed here and checked against
// the recorded order.
GroupPtr readGroupFile(const std::string& path);

// Symmetry documents reference a group file and carry the full outcome
// permutation table (|G| rows of |Omega| images).
std::string exportSymmetry(const SymmetryData& s, const std::string& groupRef);
SymmetryData importSymmetry(const std::string& json, const Assemblage& a,
                            GroupPtr group);
SymmetryData readSymmetryFile(const std::string& path, const Assemblage& a);

// Unit Bloch vectors of a platonic/Archimedean solid, one per antipodal
// vertex pair, from the shipped data file.
std::vector<std::array<double, 3>> platonicVectors(const std::string& solid);

// Exact-value strings of the reference tables: integers, + - * /, parens and
// sqrt(...), evaluated in double precision.
double evalRadical(const std::string& expr);

// ------------------------------------------------------------------ tables

struct TableRow {
  std::string group;
  int d = 0;
  int m = 0;
  std::optional<int> n;  // POVM outcome count (table 2)
  std::optional<std::string> alphaExact, betaExact;
  double alphaApprox = 0.0, betaApprox = 0.0;
  bool daggerBeta = false;
  std::string scope;  // exact | heuristic | out
  bool alphaIsBound = false, betaIsBound = false;
  bool greedyMatches = true;
  std::optional<std::string> comment;
};

struct TableSpec {
  std::string table;
  std::vector<TableRow> rows;
};

TableSpec readTableFile(const std::string& path);
TableSpec loadTable(const std::string& name);  // tables/<name>.json

}  // namespace symmetra
