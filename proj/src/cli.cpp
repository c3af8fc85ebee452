#include "sbst/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "sbst/error.hpp"
#include "sbst/pipeline.hpp"

namespace sbst {

namespace {

namespace fs = std::filesystem;

struct Flags {
  std::string config;
  std::string group;
  int width = 0;
  std::string variant;
  std::string polarity;
  std::uint64_t seed = 0;
  std::size_t budget = 0;
  int pet_window = 0;
  std::size_t mf_samples = 0;
  std::string out;
  std::string operands;
  std::string stimuli;
  std::string faults;
  std::string format;
  bool full_stores = false;

  std::vector<std::pair<std::string, CLI::Option*>> given;
};

void add_options(CLI::App* sub, Flags& f, bool oracle, bool emitter) {
  auto add = [&](const char* name, const char* key, auto& target, const char* help) {
    f.given.emplace_back(key, sub->add_option(name, target, help));
  };
  sub->add_option("--config", f.config, "JSON config file; flags override its keys");
  add("--group", "group", f.group, "builtin group name or group file");
  add("--width", "width", f.width, "data width m (1..32)");
  add("--variant", "variant", f.variant, "full or reduced constraint model");
  add("--polarity", "polarity", f.polarity, "standard or inverted");
  add("--seed", "seed", f.seed, "random seed");
  add("--budget", "budget", f.budget, "candidate draws per outstanding constraint");
  add("--pet-window", "pet_window", f.pet_window, "PET window width, 0 disables");
  add("--mf-samples", "mf_samples", f.mf_samples, "sampled multiple-fault sets per cardinality");
  add("--out", "out", f.out, "output directory");
  if (oracle || emitter) add("--operands", "operands", f.operands, "operand set file");
  if (oracle) {
    add("--stimuli", "stimuli", f.stimuli, "gate-level stimuli file (instead of operands)");
    add("--faults", "faults", f.faults, "single faults to grade: all, sa0 or sa1");
  }
  if (emitter) {
    add("--format", "format", f.format, "program format (mips)");
    f.given.emplace_back("full_stores",
                         sub->add_flag("--full-stores", f.full_stores, "store every result"));
  }
}

RunConfig resolve_config(const Flags& f) {
  RunConfig cfg = f.config.empty() ? RunConfig{} : load_config(f.config);
  nlohmann::json overrides = nlohmann::json::object();
  const std::map<std::string, nlohmann::json> values = {
      {"group", f.group},           {"width", f.width},
      {"variant", f.variant},       {"polarity", f.polarity},
      {"seed", f.seed},             {"budget", f.budget},
      {"pet_window", f.pet_window}, {"mf_samples", f.mf_samples},
      {"out", f.out},               {"operands", f.operands},
      {"stimuli", f.stimuli},       {"faults", f.faults},
      {"format", f.format},         {"full_stores", f.full_stores}};
  for (const auto& [key, opt] : f.given) {
    if (opt->count() > 0) overrides[key] = values.at(key);
  }
  apply_config(cfg, overrides);
  return cfg;
}

template <class Json>
void stamp(Json& j, const RunConfig& cfg) {
  j["provenance"] = {{"config_hash", cfg.hash()}, {"tool_version", kToolVersion}};
}

std::string header_line(const RunConfig& cfg) {
  return std::string("# config ") + cfg.hash() + ", sbstgen " + kToolVersion + "\n";
}

using Artifacts = std::vector<std::pair<std::string, std::string>>;

template <class Json>
std::string json_text(const Json& j) {
  return j.dump(2) + "\n";
}

void write_artifacts(const fs::path& dir, const Artifacts& files) {
  fs::create_directories(dir);
  for (const auto& [name, text] : files) {
    std::ofstream os(dir / name, std::ios::binary);
    if (!os) throw ConfigError("cannot write " + (dir / name).string());
    os << text;
  }
}

fs::path operand_path(const RunConfig& cfg) {
  return cfg.operands.empty() ? fs::path(cfg.out) / "operands_merged.json" : fs::path(cfg.operands);
}

std::string percent(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << v << '%';
  return os.str();
}

int cmd_generate(const RunConfig& cfg, std::ostream& out) {
  const auto group = resolve_group(cfg);
  const auto r = run_generate(group, cfg);

  Artifacts files;
  auto control = r.control.operands.to_json();
  stamp(control, cfg);
  files.emplace_back("operands.json", json_text(control));
  if (r.pet) {
    auto pet = r.pet->to_json();
    stamp(pet, cfg);
    files.emplace_back("pet.json", json_text(pet));
  }
  auto merged = r.merged.to_json();
  stamp(merged, cfg);
  files.emplace_back("operands_merged.json", json_text(merged));
  auto table = table_to_json(r.table, group);
  stamp(table, cfg);
  files.emplace_back("fault_table.json", json_text(table));
  files.emplace_back("fault_table.txt", header_line(cfg) + table_to_grid(r.table, group));

  auto cov = coverage_to_json(r.coverage, group);
  cov["variant"] = to_string(cfg.variant);
  cov["polarity"] = to_string(cfg.polarity);
  cov["model_size"] = model_size(r.universe);
  cov["control_tuples"] = r.control.operands.total_tuples();
  cov["merged_tuples"] = r.merged[0].size();
  cov["redundancy"] = redundancy_to_json(r.redundancy, group, r.coverage.satisfied, r.coverage.total);
  stamp(cov, cfg);
  files.emplace_back("coverage.json", json_text(cov));
  write_artifacts(cfg.out, files);

  const std::size_t adjusted = r.redundancy.adjusted_total(r.coverage.total);
  out << "group " << group.name() << " (n=" << group.size() << ", m=" << group.width()
      << ", p=" << group.control_width() << "), " << to_string(cfg.variant) << " model\n";
  out << "coverage " << r.coverage.satisfied << "/" << r.coverage.total << " ("
      << percent(r.coverage.percent) << "), adjusted " << r.coverage.satisfied << "/" << adjusted
      << " ("
      << percent(adjusted == 0 ? 100.0
                               : 100.0 * static_cast<double>(r.coverage.satisfied) /
                                     static_cast<double>(adjusted))
      << ")\n";
  out << "unsatisfied: " << r.redundancy.proven_redundant << " proven redundant, "
      << r.redundancy.satisfiable << " satisfiable, " << r.redundancy.unknown << " unknown\n";
  out << "control tuples " << r.control.operands.total_tuples() << ", merged tuples "
      << r.merged[0].size() << "\n";
  out << "wrote " << files.size() << " files to " << cfg.out << "\n";
  return 0;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  const auto group = resolve_group(cfg);
  std::optional<OperandSet> operands;
  std::optional<GateTestSet> test;
  if (!cfg.stimuli.empty()) {
    std::ifstream in(cfg.stimuli);
    if (!in) throw ParseError("cannot open stimuli file " + cfg.stimuli);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("stimuli file " + cfg.stimuli + ": " + e.what());
    }
    test = GateTestSet::from_json(j, group);
  } else {
    operands = OperandSet::load(operand_path(cfg), group);
    test = GateTestSet::from_operands(group, *operands);
  }
  const auto r = run_verify(group, *test, cfg, operands ? &*operands : nullptr);

  Artifacts files;
  auto add = [&](const char* name, const OracleGrade& g) {
    auto j = oracle_to_json(g);
    stamp(j, cfg);
    files.emplace_back(name, json_text(j));
  };
  add("grade_single.json", r.single);
  add("grade_multiple.json", r.multiple);
  add("grade_bridge.json", r.bridge);
  if (r.factored) add("grade_factored.json", *r.factored);
  write_artifacts(cfg.out, files);

  auto line = [&](const char* label, const OracleGrade& g) {
    out << label << g.report.detected << "/" << g.report.total << " detected, "
        << g.non_redundant_undetected.size() << " non-redundant undetected\n";
  };
  out << "stimuli " << test->stimulus_count() << ", baseline " << r.single.baseline << "\n";
  line("single SAF:   ", r.single);
  line("multiple SAF: ", r.multiple);
  line("bridges:      ", r.bridge);
  if (r.factored) line("factored SAF: ", *r.factored);
  for (const auto& name : r.single.non_redundant_undetected) out << "  undetected " << name << "\n";
  if (r.factored) {
    for (const auto& name : r.factored->non_redundant_undetected) {
      out << "  undetected (factored) " << name << "\n";
    }
  }
  out << (r.passed() ? "PASS" : "FAIL") << "\n";
  return r.passed() ? 0 : 1;
}

int cmd_emit(const RunConfig& cfg, std::ostream& out) {
  const auto group = resolve_group(cfg);
  const auto operands = OperandSet::load(operand_path(cfg), group);
  const auto prog = emit_program(group, operands, EmitOptions{cfg.format, cfg.full_stores});
  auto manifest = prog.manifest();
  if (self_check_signature(nlohmann::json(manifest)) != prog.signature) {
    throw std::logic_error("manifest signature does not replay");
  }
  stamp(manifest, cfg);
  write_artifacts(cfg.out, {{"program.s", header_line(cfg) + prog.assembly},
                            {"manifest.json", json_text(manifest)}});
  const auto counts = pattern_counts(prog);
  out << "stored " << counts.stored << ", executed " << counts.executed << ", signature "
      << format_hex(prog.signature, 32) << "\n";
  out << "wrote program.s and manifest.json to " << cfg.out << "\n";
  return 0;
}

// ---- report

std::string pad(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

void report_table(const nlohmann::json& j, std::ostream& out) {
  const auto mn = j.at("mnemonics").get<std::vector<std::string>>();
  const int width = j.at("width").get<int>();
  std::size_t label = 2;
  for (const auto& m : mn) label = std::max(label, m.size());
  const std::size_t cell = std::max(label, static_cast<std::size_t>(width));
  out << "fault table " << j.at("group").get<std::string>() << " (m=" << width << ", "
      << j.at("polarity").get<std::string>() << ")\n";
  out << pad("", label);
  for (const auto& m : mn) out << "  " << pad(m, cell);
  out << "  C1\n";
  for (std::size_t i = 0; i < mn.size(); ++i) {
    out << pad(mn[i], label);
    for (const auto& e : j.at("entries").at(i)) {
      out << "  " << pad(e.is_null() ? "-" : e.get<std::string>(), cell);
    }
    out << "  " << j.at("c1").at(i).get<std::string>() << "\n";
  }
}

void report_coverage(const nlohmann::json& j, std::ostream& out) {
  out << "coverage " << j.at("group").get<std::string>() << ": " << j.at("satisfied") << "/"
      << j.at("total") << " (" << percent(j.at("percent").get<double>()) << ")\n";
  if (j.contains("redundancy")) {
    const auto& r = j.at("redundancy");
    out << "adjusted " << percent(r.at("adjusted_percent").get<double>()) << " over "
        << r.at("adjusted_total") << " constraints\n";
    if (!r.at("verdicts").empty()) {
      out << pad("constraint", 22) << pad("verdict", 24) << pad("method", 12) << "witness\n";
      for (const auto& v : r.at("verdicts")) {
        std::string w = "-";
        if (!v.at("witness").is_null()) {
          w.clear();
          for (const auto& x : v.at("witness")) w += (w.empty() ? "" : " ") + x.get<std::string>();
        }
        out << pad(v.at("constraint").get<std::string>(), 22)
            << pad(v.at("verdict").get<std::string>(), 24)
            << pad(v.at("method").get<std::string>(), 12) << w << "\n";
      }
    }
  }
}

void report_grade(const nlohmann::json& j, std::ostream& out) {
  out << j.at("mode").get<std::string>() << " faults: " << j.at("detected") << "/"
      << j.at("total") << " detected";
  if (j.contains("coverage_percent")) out << " (" << percent(j.at("coverage_percent").get<double>()) << ")";
  out << "\n";
  const bool split = j.contains("non_redundant_undetected");
  std::set<std::string> live;
  if (split) {
    for (const auto& s : j.at("non_redundant_undetected")) live.insert(s.get<std::string>());
  }
  for (const auto& s : j.at("undetected")) {
    const auto name = s.get<std::string>();
    out << "  " << pad(name, 40) << (split ? (live.count(name) ? "NON-REDUNDANT" : "redundant") : "")
        << "\n";
  }
}

void report_manifest(const nlohmann::json& j, std::ostream& out) {
  out << "program " << j.at("group").get<std::string>() << ": stored " << j.at("stored")
      << ", executed " << j.at("executed") << ", observation "
      << j.at("observation").get<std::string>() << ", signature "
      << j.at("signature").get<std::string>() << "\n";
  for (const auto& c : j.at("cases")) {
    std::string ops;
    for (const auto& x : c.at("operands")) ops += (ops.empty() ? "" : ", ") + x.get<std::string>();
    out << "  " << pad(c.at("mnemonic").get<std::string>(), 8) << pad(ops, 26) << "-> "
        << c.at("expected").get<std::string>() << "\n";
  }
}

void report_operands(const nlohmann::json& j, std::ostream& out) {
  out << j.at("kind").get<std::string>() << " operands " << j.at("group").get<std::string>()
      << " (m=" << j.at("width") << ")\n";
  for (const auto& [mn, list] : j.at("per_instruction").items()) {
    out << "  " << pad(mn, 8) << list.size() << " tuples\n";
    for (const auto& t : list) {
      std::string ops;
      for (const auto& x : t) ops += (ops.empty() ? "" : ", ") + x.get<std::string>();
      out << "      " << ops << "\n";
    }
  }
}

int cmd_report(const std::string& path, std::ostream& out) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
    const std::string type = j.is_object() && j.contains("type") ? j.at("type").get<std::string>() : "";
    if (type == "fault_table") {
      report_table(j, out);
    } else if (type == "coverage") {
      report_coverage(j, out);
    } else if (type == "grade") {
      report_grade(j, out);
    } else if (type == "manifest") {
      report_manifest(j, out);
    } else if (j.is_object() && j.contains("per_instruction")) {
      report_operands(j, out);
    } else {
      out << j.dump(2) << "\n";
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Self-test program generator for processor control logic", "sbstgen"};
  app.set_version_flag("--version", std::string("sbstgen ") + kToolVersion);
  app.require_subcommand(1);

  Flags gen_flags, ver_flags, emit_flags;
  auto* gen = app.add_subcommand("generate", "generate operand sets, fault table and coverage");
  add_options(gen, gen_flags, false, false);
  auto* ver = app.add_subcommand("verify", "grade gate-level faults of the equivalent circuit");
  add_options(ver, ver_flags, true, false);
  auto* emit = app.add_subcommand("emit", "emit a self-test program and manifest");
  add_options(emit, emit_flags, false, true);
  std::string report_file;
  auto* rep = app.add_subcommand("report", "pretty-print a JSON artifact");
  rep->add_option("file", report_file, "artifact to print")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*gen) return cmd_generate(resolve_config(gen_flags), out);
    if (*ver) return cmd_verify(resolve_config(ver_flags), out);
    if (*emit) return cmd_emit(resolve_config(emit_flags), out);
    if (*rep) return cmd_report(report_file, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ContractError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace sbst
