#include "symmetra/cli.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "symmetra/bundle.hpp"
#include "symmetra/construct.hpp"
#include "symmetra/errors.hpp"
#include "symmetra/field.hpp"
#include "symmetra/incompat.hpp"
#include "symmetra/io.hpp"
#include "symmetra/mub.hpp"
#include "symmetra/steering.hpp"
#include "symmetra/table.hpp"

namespace symmetra {

namespace {

using nlohmann::json;

std::string readAllStdin() {
  std::ostringstream ss;
  ss << std::cin.rdbuf();
  return ss.str();
}

ImportedAssemblage loadAssemblageArg(const std::string& path) {
  if (path.empty()) return importAssemblage(readAllStdin());
  return readAssemblageFile(path);
}

std::string resolveGroupPath(const std::string& arg) {
  if (std::filesystem::exists(arg)) return arg;
  std::string name = arg;
  if (name.find(".json") == std::string::npos) name += ".json";
  return dataFile("groups/" + name);
}

const char* methodName(StatMethod m) {
  return m == StatMethod::Exhaustive ? "exhaustive" : "greedy";
}

const char* boundName(BoundKind b) {
  switch (b) {
    case BoundKind::Exact: return "exact";
    case BoundKind::LowerBound: return "lower";
    case BoundKind::UpperBound: return "upper";
  }
  return "exact";
}

const char* verdictName(OracleVerdict v) {
  switch (v) {
    case OracleVerdict::Compatible: return "compatible";
    case OracleVerdict::Incompatible: return "incompatible";
    case OracleVerdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

const char* daggerName(DaggerStatus s) {
  switch (s) {
    case DaggerStatus::None: return "none";
    case DaggerStatus::Candidate: return "candidate";
    case DaggerStatus::Certified: return "certified";
  }
  return "none";
}

json statJson(const SectionStatistic& s) {
  return json{{"value", s.value},
              {"section", s.section.outcomes},
              {"method", methodName(s.method)},
              {"bound", boundName(s.boundDirection)}};
}

json reportJson(const RobustnessReport& r) {
  return json{{"schema", "symmetra-report/1"},
              {"Z", r.Z},
              {"lambda", statJson(r.lambda)},
              {"mu", statJson(r.mu)},
              {"alpha_star", r.alphaStar},
              {"beta_star", r.betaStar},
              {"rank_one_projective", r.rankOneProjective},
              {"alpha_bound", boundName(r.alphaBound)},
              {"beta_bound", boundName(r.betaBound)},
              {"certified", r.formulaCertified},
              {"note", r.certificationNote}};
}

json oracleJson(const OracleResult& r) {
  json doc{{"verdict", verdictName(r.verdict)},
           {"iterations", r.iterations},
           {"residual", r.residual},
           {"note", r.note}};
  if (std::isfinite(r.certifiedBound)) doc["certified_bound"] = r.certifiedBound;
  return doc;
}

void printReport(std::ostream& out, const std::string& name,
                 const Assemblage& a, const RobustnessReport& r) {
  out << std::setprecision(9) << std::fixed;
  out << "assemblage " << (name.empty() ? "(unnamed)" : name) << ": d=" << a.dim
      << ", " << a.bundle.measurements() << " measurements, "
      << a.bundle.outcomes() << " outcomes\n";
  out << "Z       = " << r.Z << "\n";
  out << "lambda  = " << r.lambda.value << "  (" << methodName(r.lambda.method)
      << ", " << boundName(r.lambda.boundDirection) << ")\n";
  out << "mu      = " << r.mu.value << "  (" << methodName(r.mu.method) << ", "
      << boundName(r.mu.boundDirection) << ")\n";
  out << "alpha*  = " << r.alphaStar << "\n";
  out << "beta*   = " << r.betaStar << "\n";
  out << "certified: " << (r.formulaCertified ? "yes" : "no") << " — "
      << r.certificationNote << "\n";
  out.unsetf(std::ios::fixed);
}

struct CommonArgs {
  std::string assemblagePath;
  std::string symmetryPath;
  bool exhaustive = false;
  bool greedy = false;
};

void addCommonOptions(CLI::App* cmd, CommonArgs& c, bool withMethod) {
  cmd->add_option("--assemblage", c.assemblagePath,
                  "assemblage JSON file (read from stdin when absent)");
  cmd->add_option("--symmetry", c.symmetryPath, "symmetry JSON file");
  if (withMethod) {
    cmd->add_flag("--exhaustive", c.exhaustive,
                  "exhaustive section scan (default)");
    cmd->add_flag("--greedy", c.greedy, "greedy local-search statistics");
  }
}

StatMethod methodFrom(const CommonArgs& c) {
  if (c.exhaustive && c.greedy)
    throw UsageError("choose one of --exhaustive / --greedy");
  return c.greedy ? StatMethod::Greedy : StatMethod::Exhaustive;
}

}  // namespace

int commandDispatch(const std::vector<std::string>& args, std::ostream& out,
                    std::ostream& err) {
  CLI::App app{
      "symmetra — highly symmetric measurement assemblages: construction, "
      "incompatibility robustness, steering"};
  app.name("symmetra");
  app.fallthrough(true);
  app.require_subcommand(1);

  bool asJson = false;
  double tolerance = 1e-8;
  std::uint64_t sectionCap = 100000000ULL;
  int threads = 1;
  unsigned seed = 99;
  app.add_flag("--json", asJson, "machine-readable output");
  app.add_option("--tolerance", tolerance, "tolerance for validation checks");
  app.add_option("--section-cap", sectionCap,
                 "largest section count an exhaustive scan will attempt");
  app.add_option("--threads", threads, "threads for exhaustive scans");
  app.add_option("--seed", seed,
                 "reserved; all in-scope algorithms are deterministic");

  auto* cmdConstruct = app.add_subcommand(
      "construct", "build covariant assemblages from a group file");
  std::string groupArg;
  int povmN = 0;
  cmdConstruct->add_option("--group", groupArg, "group JSON file or data stem")
      ->required();
  cmdConstruct->add_option(
      "--povm", povmN, "POVM block size (projective grouping when absent)");

  auto* cmdMub = app.add_subcommand(
      "mub", "emit the complete MUB assemblage of a prime power dimension");
  int mubDim = 0;
  cmdMub->add_option("--dimension", mubDim, "prime power dimension")
      ->required();

  CommonArgs common;
  auto* cmdAnalyze =
      app.add_subcommand("analyze", "incompatibility robustness report");
  addCommonOptions(cmdAnalyze, common, true);
  double oracleEta = std::numeric_limits<double>::quiet_NaN();
  std::string noiseName = "white";
  cmdAnalyze->add_option(
      "--oracle", oracleEta,
      "also run the first-order compatibility oracle at this noise level");
  cmdAnalyze->add_option("--noise", noiseName, "noise family for --oracle")
      ->check(CLI::IsMember({"white", "complement"}));

  auto* cmdSteer = app.add_subcommand(
      "steer", "steering thresholds and the dichotomic comparison");
  addCommonOptions(cmdSteer, common, true);

  auto* cmdTable =
      app.add_subcommand("table", "reproduce a reference table");
  std::string tableName;
  int tableDim = 0;
  int maxD = 5;
  cmdTable->add_option("--name", tableName, "table1 | table2 | table3")
      ->required()
      ->check(CLI::IsMember({"table1", "table2", "table3"}));
  cmdTable->add_option("--dimension", tableDim,
                       "restrict to rows of this dimension");
  cmdTable->add_option("--max-d", maxD,
                       "largest dimension evaluated (larger rows are listed "
                       "but skipped)");

  auto* cmdExport = app.add_subcommand(
      "export", "validate an assemblage document and re-emit it");
  addCommonOptions(cmdExport, common, false);
  std::string exportName;
  cmdExport->add_option("--name", exportName, "name recorded in the document");

  auto* cmdVerify = app.add_subcommand(
      "verify", "normalization, covariance, uniformity and rigidity checks");
  addCommonOptions(cmdVerify, common, false);

  std::vector<const char*> argv;
  argv.push_back("symmetra");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  ScanOptions scan;
  scan.sectionCap = sectionCap;
  scan.threads = threads;

  try {
    if (app.got_subcommand(cmdMub)) {
      if (mubDim < 2) throw UsageError("--dimension must be at least 2");
      FiniteField f;
      try {
        f = buildField(mubDim);
      } catch (const NotPrime& e) {
        throw UsageError(e.what());
      }
      Assemblage a = mubAssemblage(f);
      out << exportAssemblage(a, "mub-d" + std::to_string(mubDim)) << "\n";
      return 0;
    }

    if (app.got_subcommand(cmdConstruct)) {
      const std::string path = resolveGroupPath(groupArg);
      GroupPtr g = readGroupFile(path);
      const GroupingMode mode =
          povmN > 0 ? GroupingMode::povm(povmN) : GroupingMode::projectiveMode();
      ConstructionResult res = constructAssemblages(g, mode);
      if (asJson) {
        json doc{{"schema", "symmetra-construction/1"},
                 {"group", path},
                 {"order", g->order()},
                 {"mode", mode.label()}};
        doc["assemblages"] = json::array();
        for (const auto& c : res.assemblages) {
          const auto& b = c.assemblage.bundle;
          json a = json::parse(exportAssemblage(
              c.assemblage,
              mode.label() + "-m" + std::to_string(b.measurements())));
          a["stabilizer_order"] = c.stabilizerOrder;
          doc["assemblages"].push_back(std::move(a));
        }
        doc["rejected"] = res.rejected;
        out << doc.dump(2) << "\n";
      } else {
        out << "constructed " << res.assemblages.size()
            << " assemblage(s) in mode " << mode.label()
            << " from a group of order " << g->order() << "\n";
        for (size_t i = 0; i < res.assemblages.size(); ++i) {
          const auto& c = res.assemblages[i];
          const auto& b = c.assemblage.bundle;
          out << "  [" << i << "] m=" << b.measurements()
              << " fibre=" << b.fibreSizes[0] << " outcomes=" << b.outcomes()
              << " stabilizer order " << c.stabilizerOrder << "\n";
        }
        for (const auto& r : res.rejected) out << "  rejected: " << r << "\n";
      }
      return 0;
    }

    if (app.got_subcommand(cmdAnalyze)) {
      auto imported = loadAssemblageArg(common.assemblagePath);
      const Assemblage& a = imported.assemblage;
      std::optional<SymmetryData> sym;
      if (!common.symmetryPath.empty())
        sym = readSymmetryFile(common.symmetryPath, a);
      RobustnessReport rep = robustnessReport(
          a, sym ? &*sym : nullptr, methodFrom(common), scan);
      bool ranOracle = std::isfinite(oracleEta);
      OracleResult oracle;
      if (ranOracle) {
        OracleOptions oo;
        oo.symmetry = sym ? &*sym : nullptr;
        oo.scan = scan;
        const NoiseKind kind = noiseName == "complement"
                                   ? NoiseKind::Complement
                                   : NoiseKind::White;
        oracle = compatibilityOracle(a, oracleEta, kind, oo);
      }
      if (asJson) {
        json doc = reportJson(rep);
        doc["name"] = imported.name;
        if (ranOracle) doc["oracle"] = oracleJson(oracle);
        out << doc.dump(2) << "\n";
      } else {
        printReport(out, imported.name, a, rep);
        if (ranOracle) {
          out << "oracle at eta = " << oracleEta << " (" << noiseName
              << "): " << verdictName(oracle.verdict) << " after "
              << oracle.iterations << " iteration(s), residual "
              << std::scientific << std::setprecision(2) << oracle.residual
              << std::defaultfloat;
          if (std::isfinite(oracle.certifiedBound))
            out << ", certified threshold bound "
                << std::setprecision(9) << oracle.certifiedBound;
          out << "\n";
          if (!oracle.note.empty()) out << "  " << oracle.note << "\n";
        }
      }
      return 0;
    }

    if (app.got_subcommand(cmdSteer)) {
      auto imported = loadAssemblageArg(common.assemblagePath);
      const Assemblage& a = imported.assemblage;
      std::optional<SymmetryData> sym;
      if (!common.symmetryPath.empty())
        sym = readSymmetryFile(common.symmetryPath, a);
      RobustnessReport rep = robustnessReport(
          a, sym ? &*sym : nullptr, methodFrom(common), scan);
      SteeringReport sr = flagBeatsDichotomic(rep, a.dim);
      if (asJson) {
        json doc{{"schema", "symmetra-steering/1"},
                 {"name", imported.name},
                 {"isotropic_threshold", sr.isotropicThreshold},
                 {"werner_threshold", sr.wernerThreshold},
                 {"dichotomic_isotropic", sr.dichotomicIso},
                 {"dichotomic_werner", sr.dichotomicWer},
                 {"beats_dichotomic_isotropic", sr.beatsDichotomicIso},
                 {"beats_dichotomic_werner", sr.beatsDichotomicWer},
                 {"dagger_isotropic", daggerName(sr.daggerIso)},
                 {"dagger_werner", daggerName(sr.daggerWer)},
                 {"certified", rep.formulaCertified}};
        out << doc.dump(2) << "\n";
      } else {
        out << std::setprecision(9) << std::fixed;
        out << "steering thresholds for "
            << (imported.name.empty() ? "(unnamed)" : imported.name)
            << " (d=" << a.dim << ")\n";
        out << "isotropic states: eta* = " << sr.isotropicThreshold
            << "   dichotomic bound " << sr.dichotomicIso << "  -> "
            << (sr.beatsDichotomicIso ? "beats it" : "does not beat it")
            << " (dagger " << daggerName(sr.daggerIso) << ")\n";
        out << "Werner states:    eta* = " << sr.wernerThreshold
            << "   dichotomic bound " << sr.dichotomicWer << "  -> "
            << (sr.beatsDichotomicWer ? "beats it" : "does not beat it")
            << " (dagger " << daggerName(sr.daggerWer) << ")\n";
        out.unsetf(std::ios::fixed);
      }
      return 0;
    }

    if (app.got_subcommand(cmdTable)) {
      TableRunOptions topts;
      topts.onlyDimension = tableDim;
      topts.maxDim = maxD;
      topts.scan = scan;
      TableOutcome res = runTable(tableName, topts);
      if (asJson) {
        json doc{{"schema", "symmetra-tablerun/1"},
                 {"table", res.table},
                 {"evaluated", res.evaluatedCount},
                 {"mismatches", res.mismatchCount},
                 {"all_matched", res.allMatched}};
        doc["rows"] = json::array();
        for (const auto& r : res.rows) {
          json row{{"group", r.row.group}, {"d", r.row.d},     {"m", r.row.m},
                   {"scope", r.row.scope}, {"evaluated", r.evaluated},
                   {"matched", r.matched}, {"note", r.note}};
          if (r.row.n) row["n"] = *r.row.n;
          if (r.evaluated) {
            row["alpha_star"] = r.alpha;
            row["beta_star"] = r.beta;
            row["alpha_table"] = r.row.alphaApprox;
            row["beta_table"] = r.row.betaApprox;
            row["method"] = methodName(r.method);
            row["certified"] = r.certified;
            row["seconds"] = r.seconds;
          }
          doc["rows"].push_back(std::move(row));
        }
        out << doc.dump(2) << "\n";
      } else {
        out << res.table << "\n";
        for (const auto& r : res.rows) out << formatRowOutcome(r) << "\n";
        out << res.evaluatedCount << " row(s) evaluated, "
            << res.mismatchCount << " mismatch(es)\n";
      }
      return res.allMatched ? 0 : 1;
    }

    if (app.got_subcommand(cmdExport)) {
      auto imported = loadAssemblageArg(common.assemblagePath);
      const std::string name =
          exportName.empty() ? imported.name : exportName;
      out << exportAssemblage(imported.assemblage, name) << "\n";
      return 0;
    }

    if (app.got_subcommand(cmdVerify)) {
      auto imported = loadAssemblageArg(common.assemblagePath);
      const Assemblage& a = imported.assemblage;
      bool allOk = true;
      NormalizationReport nr = checkNormalization(a, tolerance);
      allOk = allOk && nr.ok;
      json doc{{"schema", "symmetra-verify/1"}, {"name", imported.name}};
      doc["normalization"] = {{"ok", nr.ok},
                              {"worst_fibre_defect", nr.worstFibreDefect},
                              {"worst_effect_min_eig", nr.worstEffectMinEig},
                              {"worst_herm_defect", nr.worstHermDefect}};
      std::ostringstream human;
      human << std::setprecision(3) << std::scientific;
      human << "normalization: " << (nr.ok ? "ok" : "FAIL")
            << " (fibre defect " << nr.worstFibreDefect << ", min eig "
            << nr.worstEffectMinEig << ")\n";
      if (!common.symmetryPath.empty()) {
        SymmetryData sym = readSymmetryFile(common.symmetryPath, a);
        checkSymmetry(a, sym, tolerance);
        human << "covariance:    ok (group order " << sym.group->order()
              << ")\n";
        const bool uniform = isUniform(a, sym);
        RigidityReport rr = isRigid(a, sym);
        allOk = allOk && uniform && rr.rigid;
        human << "uniform:       " << (uniform ? "ok" : "FAIL") << "\n";
        human << "rigid:         " << (rr.rigid ? "ok" : "FAIL")
              << " (span defect " << rr.worstSpanDefect << ")\n";
        doc["covariance"] = {{"ok", true},
                             {"group_order", sym.group->order()}};
        doc["uniform"] = uniform;
        doc["rigid"] = {{"ok", rr.rigid},
                        {"commutant_dims", rr.commutantDims},
                        {"worst_span_defect", rr.worstSpanDefect},
                        {"worst_projection_defect",
                         rr.worstProjectionDefect}};
      }
      doc["ok"] = allOk;
      if (asJson)
        out << doc.dump(2) << "\n";
      else
        out << human.str();
      return allOk ? 0 : 1;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const SchemaMismatch& e) {
    err << "input error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  err << "usage error: no command given\n";
  return 2;
}

}  // namespace symmetra
