#include "symmetra/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "symmetra/errors.hpp"
#include "symmetra/numerics.hpp"

namespace symmetra {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

#ifndef SYMMETRA_SOURCE_DATA_DIR
#define SYMMETRA_SOURCE_DATA_DIR ""
#endif

std::string executableDir() {
  std::error_code ec;
  const fs::path exe = fs::read_symlink("/proc/self/exe", ec);
  if (ec) return {};
  return exe.parent_path().string();
}

std::string readWholeFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaMismatch("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

json parseJson(const std::string& text, const std::string& what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded())
    throw SchemaMismatch("invalid JSON in " + what);
  return j;
}

void requireSchema(const json& j, const std::string& expected,
                   const std::string& what) {
  if (!j.is_object() || !j.contains("schema") || !j["schema"].is_string() ||
      j["schema"].get<std::string>() != expected)
    throw SchemaMismatch(what + ": expected schema \"" + expected + "\"");
}

json matToJson(const CMat& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json rowRe = json::array(), rowIm = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      rowRe.push_back(m(r, c).real());
      rowIm.push_back(m(r, c).imag());
    }
    re.push_back(std::move(rowRe));
    im.push_back(std::move(rowIm));
  }
  return json{{"re", std::move(re)}, {"im", std::move(im)}};
}

CMat jsonToMat(const json& j, const std::string& what) {
  if (!j.is_object() || !j.contains("re") || !j.contains("im"))
    throw SchemaMismatch(what + ": matrix needs \"re\" and \"im\"");
  const json& re = j["re"];
  const json& im = j["im"];
  if (!re.is_array() || !im.is_array() || re.size() != im.size() ||
      re.empty())
    throw SchemaMismatch(what + ": malformed matrix arrays");
  const size_t rows = re.size();
  const size_t cols = re[0].size();
  CMat m(rows, cols);
  for (size_t r = 0; r < rows; ++r) {
    if (!re[r].is_array() || re[r].size() != cols || !im[r].is_array() ||
        im[r].size() != cols)
      throw SchemaMismatch(what + ": ragged matrix rows");
    for (size_t c = 0; c < cols; ++c)
      m(r, c) = Complex(re[r][c].get<double>(), im[r][c].get<double>());
  }
  return m;
}

}  // namespace

std::string dataDir() {
  if (const char* env = std::getenv("SYMMETRA_DATA_DIR");
      env != nullptr && *env != '\0')
    return env;
  const std::string source = SYMMETRA_SOURCE_DATA_DIR;
  std::error_code ec;
  if (!source.empty() && fs::is_directory(source, ec)) return source;
  if (const std::string exeDir = executableDir(); !exeDir.empty()) {
    const fs::path share =
        fs::path(exeDir).parent_path() / "share" / "symmetra" / "data";
    if (fs::is_directory(share, ec)) return share.string();
  }
  return "data";
}

std::string dataFile(const std::string& relative) {
  const fs::path p = fs::path(dataDir()) / relative;
  std::error_code ec;
  if (!fs::exists(p, ec))
    throw SchemaMismatch("data file not found: " + p.string());
  return p.string();
}

std::string exportAssemblage(const Assemblage& a, const std::string& name) {
  json doc;
  doc["schema"] = "symmetra-assemblage/1";
  doc["name"] = name;
  doc["dim"] = a.dim;
  json measurements = json::array();
  for (int x = 0; x < a.bundle.measurements(); ++x) {
    json fibre = json::array();
    for (int o = 0; o < a.bundle.fibreSizes[x]; ++o)
      fibre.push_back(matToJson(a.effects[a.bundle.globalIndex(x, o)]));
    measurements.push_back(std::move(fibre));
  }
  doc["measurements"] = std::move(measurements);
  return doc.dump(2) + "\n";
}

ImportedAssemblage importAssemblage(const std::string& text) {
  const json doc = parseJson(text, "assemblage document");
  requireSchema(doc, "symmetra-assemblage/1", "assemblage document");
  if (!doc.contains("dim") || !doc.contains("measurements") ||
      !doc["measurements"].is_array() || doc["measurements"].empty())
    throw SchemaMismatch("assemblage document: missing dim or measurements");
  ImportedAssemblage out;
  out.name = doc.value("name", std::string{});
  Assemblage& a = out.assemblage;
  a.dim = doc["dim"].get<int>();
  if (a.dim < 1) throw SchemaMismatch("assemblage document: dim < 1");
  std::vector<int> sizes;
  for (const json& fibre : doc["measurements"]) {
    if (!fibre.is_array() || fibre.empty())
      throw SchemaMismatch("assemblage document: empty fibre");
    sizes.push_back(static_cast<int>(fibre.size()));
    for (const json& eff : fibre) {
      CMat m = jsonToMat(eff, "assemblage effect");
      if (m.rows() != a.dim || m.cols() != a.dim)
        throw SchemaMismatch("assemblage document: effect dimension mismatch");
      a.effects.push_back(std::move(m));
    }
  }
  a.bundle = OutcomeBundle::fromFibreSizes(std::move(sizes));
  const NormalizationReport rep = checkNormalization(a, 1e-8);
  if (!rep.ok) {
    std::ostringstream os;
    os << "assemblage document fails normalization: fibre defect "
       << rep.worstFibreDefect << ", min eig " << rep.worstEffectMinEig;
    throw InvariantViolation(os.str());
  }
  return out;
}

ImportedAssemblage readAssemblageFile(const std::string& path) {
  return importAssemblage(readWholeFile(path));
}

GroupPtr readGroupFile(const std::string& path) {
  const json doc = parseJson(readWholeFile(path), path);
  requireSchema(doc, "symmetra-group/1", path);
  if (!doc.contains("dim") || !doc.contains("generators") ||
      !doc["generators"].is_array() || doc["generators"].empty())
    throw SchemaMismatch(path + ": missing dim or generators");
  const int dim = doc["dim"].get<int>();
  std::vector<CMat> gens;
  for (const json& g : doc["generators"]) {
    CMat m = jsonToMat(g, path + " generator");
    if (m.rows() != dim || m.cols() != dim)
      throw SchemaMismatch(path + ": generator dimension mismatch");
    gens.push_back(std::move(m));
  }
  GroupPtr group =
      std::make_shared<const FiniteMatrixGroup>(closeGenerators(gens));
  if (doc.contains("expected_order")) {
    const int expected = doc["expected_order"].get<int>();
    if (group->order() != expected) {
      std::ostringstream os;
      os << path << ": generators close to order " << group->order()
         << ", file records " << expected;
      throw SchemaMismatch(os.str());
    }
  }
  return group;
}

std::string exportSymmetry(const SymmetryData& s, const std::string& groupRef) {
  json doc;
  doc["schema"] = "symmetra-symmetry/1";
  doc["group"] = groupRef;
  json perms = json::array();
  const int n = s.group->order();
  const int omega = s.outcomeAction.points;
  for (int g = 0; g < n; ++g) {
    json row = json::array();
    for (int z = 0; z < omega; ++z) row.push_back(s.outcomeAction.apply(g, z));
    perms.push_back(std::move(row));
  }
  doc["outcome_permutations"] = std::move(perms);
  return doc.dump() + "\n";
}

SymmetryData importSymmetry(const std::string& text, const Assemblage& a,
                            GroupPtr group) {
  const json doc = parseJson(text, "symmetry document");
  requireSchema(doc, "symmetra-symmetry/1", "symmetry document");
  if (!doc.contains("outcome_permutations") ||
      !doc["outcome_permutations"].is_array())
    throw SchemaMismatch("symmetry document: missing outcome_permutations");
  const json& perms = doc["outcome_permutations"];
  const int n = group->order();
  const int omega = a.bundle.outcomes();
  if (static_cast<int>(perms.size()) != n)
    throw SchemaMismatch(
        "symmetry document: permutation row count differs from group order");
  std::vector<int32_t> images;
  images.reserve(static_cast<size_t>(n) * omega);
  for (const json& row : perms) {
    if (!row.is_array() || static_cast<int>(row.size()) != omega)
      throw SchemaMismatch("symmetry document: permutation row length "
                           "differs from outcome count");
    for (const json& v : row) images.push_back(v.get<int32_t>());
  }
  return makeSymmetryData(a, std::move(group), std::move(images));
}

SymmetryData readSymmetryFile(const std::string& path, const Assemblage& a) {
  const std::string text = readWholeFile(path);
  const json doc = parseJson(text, path);
  requireSchema(doc, "symmetra-symmetry/1", path);
  if (!doc.contains("group") || !doc["group"].is_string())
    throw SchemaMismatch(path + ": missing group reference");
  const std::string ref = doc["group"].get<std::string>();
  fs::path groupPath(ref);
  if (groupPath.is_relative()) {
    const fs::path sibling = fs::path(path).parent_path() / groupPath;
    std::error_code ec;
    if (fs::exists(sibling, ec))
      groupPath = sibling;
    else
      groupPath = fs::path(dataDir()) / groupPath;
  }
  return importSymmetry(text, a, readGroupFile(groupPath.string()));
}

std::vector<std::array<double, 3>> platonicVectors(const std::string& solid) {
  const json doc =
      parseJson(readWholeFile(dataFile("platonic_solids.json")),
                "platonic_solids.json");
  requireSchema(doc, "symmetra-platonic/1", "platonic_solids.json");
  if (!doc.contains("solids") || !doc["solids"].contains(solid))
    throw SchemaMismatch("unknown solid: " + solid);
  const json& vecs = doc["solids"][solid]["bloch_vectors"];
  std::vector<std::array<double, 3>> out;
  for (const json& v : vecs) {
    if (!v.is_array() || v.size() != 3)
      throw SchemaMismatch("platonic_solids.json: malformed vector");
    out.push_back({v[0].get<double>(), v[1].get<double>(), v[2].get<double>()});
  }
  return out;
}

// ----------------------------------------------------------------- radicals

namespace {

// Grammar: expr := term {(+|-) term}; term := factor {(*|/) factor};
// factor := integer | ( expr ) | sqrt ( expr ) | - factor
class RadicalParser {
 public:
  explicit RadicalParser(const std::string& s) : s_(s) {}

  double parse() {
    const double v = expr();
    skipSpace();
    if (pos_ != s_.size()) fail("trailing characters");
    return v;
  }

 private:
  const std::string& s_;
  size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& why) const {
    std::ostringstream os;
    os << "bad exact-value expression \"" << s_ << "\" at position " << pos_
       << ": " << why;
    throw SchemaMismatch(os.str());
  }
  void skipSpace() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
  }
  bool eat(char c) {
    skipSpace();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  double expr() {
    double v = term();
    for (;;) {
      if (eat('+'))
        v += term();
      else if (eat('-'))
        v -= term();
      else
        return v;
    }
  }
  double term() {
    double v = factor();
    for (;;) {
      if (eat('*'))
        v *= factor();
      else if (eat('/')) {
        const double d = factor();
        if (d == 0.0) fail("division by zero");
        v /= d;
      } else
        return v;
    }
  }
  double factor() {
    skipSpace();
    if (eat('-')) return -factor();
    if (eat('(')) {
      const double v = expr();
      if (!eat(')')) fail("expected ')'");
      return v;
    }
    if (s_.compare(pos_, 4, "sqrt") == 0) {
      pos_ += 4;
      if (!eat('(')) fail("expected '(' after sqrt");
      const double v = expr();
      if (!eat(')')) fail("expected ')'");
      if (v < 0.0) fail("sqrt of negative value");
      return std::sqrt(v);
    }
    if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      size_t end = pos_;
      while (end < s_.size() &&
             (std::isdigit(static_cast<unsigned char>(s_[end])) ||
              s_[end] == '.'))
        ++end;
      const double v = std::stod(s_.substr(pos_, end - pos_));
      pos_ = end;
      return v;
    }
    fail("expected a number, sqrt or parenthesis");
  }
};

}  // namespace

double evalRadical(const std::string& expr) {
  return RadicalParser(expr).parse();
}

TableSpec readTableFile(const std::string& path) {
  const json doc = parseJson(readWholeFile(path), path);
  requireSchema(doc, "symmetra-table/1", path);
  if (!doc.contains("table") || !doc.contains("rows") ||
      !doc["rows"].is_array())
    throw SchemaMismatch(path + ": missing table name or rows");
  TableSpec spec;
  spec.table = doc["table"].get<std::string>();
  for (const json& r : doc["rows"]) {
    TableRow row;
    row.group = r.at("group").get<std::string>();
    row.d = r.at("d").get<int>();
    row.m = r.at("m").get<int>();
    if (r.contains("n") && !r["n"].is_null()) row.n = r["n"].get<int>();
    if (r.contains("alpha_exact") && !r["alpha_exact"].is_null())
      row.alphaExact = r["alpha_exact"].get<std::string>();
    if (r.contains("beta_exact") && !r["beta_exact"].is_null())
      row.betaExact = r["beta_exact"].get<std::string>();
    row.alphaApprox = r.at("alpha_approx").get<double>();
    row.betaApprox = r.at("beta_approx").get<double>();
    row.daggerBeta = r.at("dagger_beta").get<bool>();
    row.scope = r.at("scope").get<std::string>();
    row.alphaIsBound = r.at("alpha_is_bound").get<bool>();
    row.betaIsBound = r.at("beta_is_bound").get<bool>();
    row.greedyMatches = r.at("greedy_matches").get<bool>();
    if (r.contains("comment") && !r["comment"].is_null())
      row.comment = r["comment"].get<std::string>();
    if (row.scope != "exact" && row.scope != "heuristic" && row.scope != "out")
      throw SchemaMismatch(path + ": unknown scope " + row.scope);
    // Printed decimals must match the evaluated exact expressions at the
    // recorded print precision.
    const double printTol = 1e-4;
    if (row.alphaExact &&
        std::abs(evalRadical(*row.alphaExact) - row.alphaApprox) > printTol)
      throw SchemaMismatch(path + ": alpha_exact disagrees with alpha_approx");
    if (row.betaExact &&
        std::abs(evalRadical(*row.betaExact) - row.betaApprox) > printTol)
      throw SchemaMismatch(path + ": beta_exact disagrees with beta_approx");
    spec.rows.push_back(std::move(row));
  }
  return spec;
}

TableSpec loadTable(const std::string& name) {
  return readTableFile(dataFile("tables/" + name + ".json"));
}

}  // namespace symmetra
