#include "sbst/pipeline.hpp"

#include <fstream>
#include <random>
#include <set>

#include "sbst/error.hpp"

namespace sbst {

namespace {

std::string_view bridge_name(BridgeModel m) {
  return m == BridgeModel::kWiredAnd ? "wired_and" : "wired_or";
}

std::string_view faults_name(FaultValues f) {
  switch (f) {
    case FaultValues::kBoth: return "all";
    case FaultValues::kSa0: return "sa0";
    case FaultValues::kSa1: return "sa1";
  }
  return "all";
}

template <class T>
T get_checked(const nlohmann::json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001B3ull;
  }
  return h;
}

}  // namespace

nlohmann::json RunConfig::canonical() const {
  nlohmann::json j;
  j["group"] = group;
  j["width"] = width ? nlohmann::json(*width) : nlohmann::json(nullptr);
  j["variant"] = to_string(variant);
  j["polarity"] = to_string(polarity);
  j["seed"] = seed;
  j["budget"] = budget;
  j["pet_window"] = pet_window;
  j["mf_samples"] = mf_samples;
  auto models = nlohmann::json::array();
  for (auto m : bridge_models) models.push_back(bridge_name(m));
  j["bridge_models"] = models;
  j["faults"] = faults_name(faults);
  j["full_stores"] = full_stores;
  j["operands"] = operands;
  j["stimuli"] = stimuli;
  j["format"] = format;
  return j;
}

std::string RunConfig::hash() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::uint64_t h = fnv1a(canonical().dump());
  std::string out(16, '0');
  for (int x = 15; x >= 0; --x, h >>= 4) out[static_cast<std::size_t>(x)] = kDigits[h & 0xF];
  return out;
}

void apply_config(RunConfig& cfg, const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "group") {
      cfg.group = get_checked<std::string>(v, key);
    } else if (key == "width") {
      cfg.width = v.is_null() ? std::nullopt : std::optional<int>(get_checked<int>(v, key));
    } else if (key == "variant") {
      cfg.variant = parse_variant(get_checked<std::string>(v, key));
    } else if (key == "polarity") {
      cfg.polarity = parse_polarity(get_checked<std::string>(v, key));
    } else if (key == "seed") {
      cfg.seed = get_checked<std::uint64_t>(v, key);
    } else if (key == "budget") {
      cfg.budget = get_checked<std::size_t>(v, key);
    } else if (key == "pet_window") {
      cfg.pet_window = get_checked<int>(v, key);
    } else if (key == "mf_samples") {
      cfg.mf_samples = get_checked<std::size_t>(v, key);
    } else if (key == "bridge_models") {
      cfg.bridge_models.clear();
      for (const auto& m : get_checked<std::vector<std::string>>(v, key)) {
        if (m == "wired_and") {
          cfg.bridge_models.push_back(BridgeModel::kWiredAnd);
        } else if (m == "wired_or") {
          cfg.bridge_models.push_back(BridgeModel::kWiredOr);
        } else {
          throw ConfigError("unknown bridge model '" + m + "' (expected wired_and or wired_or)");
        }
      }
    } else if (key == "faults") {
      const auto f = get_checked<std::string>(v, key);
      if (f == "all") {
        cfg.faults = FaultValues::kBoth;
      } else if (f == "sa0") {
        cfg.faults = FaultValues::kSa0;
      } else if (f == "sa1") {
        cfg.faults = FaultValues::kSa1;
      } else {
        throw ConfigError("unknown fault selection '" + f + "' (expected all, sa0 or sa1)");
      }
    } else if (key == "out") {
      cfg.out = get_checked<std::string>(v, key);
    } else if (key == "full_stores") {
      cfg.full_stores = get_checked<bool>(v, key);
    } else if (key == "operands") {
      cfg.operands = get_checked<std::string>(v, key);
    } else if (key == "stimuli") {
      cfg.stimuli = get_checked<std::string>(v, key);
    } else if (key == "format") {
      cfg.format = get_checked<std::string>(v, key);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  if (cfg.budget == 0) throw ConfigError("budget must be positive");
  if (cfg.pet_window < 0) throw ConfigError("pet_window must be >= 0");
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file " + path.string() + ": " + e.what());
  }
  RunConfig cfg;
  apply_config(cfg, j);
  return cfg;
}

InstructionGroup resolve_group(const RunConfig& cfg) {
  for (auto name : builtin_group_names()) {
    if (name == cfg.group) return builtin_group(name, cfg.width.value_or(8));
  }
  if (!std::filesystem::is_regular_file(cfg.group)) {
    std::string names;
    for (auto name : builtin_group_names()) names += (names.empty() ? "" : ", ") + std::string(name);
    throw ConfigError("group '" + cfg.group + "' is neither a builtin (" + names +
                      ") nor a readable group file");
  }
  auto group = load_group(cfg.group);
  if (cfg.width && *cfg.width != group.width()) return group.with_width(*cfg.width);
  return group;
}

GenerateResult run_generate(const InstructionGroup& group, const RunConfig& cfg) {
  if (cfg.pet_window > group.width()) {
    throw ConfigError("pet window " + std::to_string(cfg.pet_window) + " exceeds width " +
                      std::to_string(group.width()) + "; use --pet-window 0.." +
                      std::to_string(group.width()));
  }
  if (cfg.pet_window * group.operand_arity() > 16) {
    throw ConfigError("pet window " + std::to_string(cfg.pet_window) +
                      " needs more than 2^16 combinations; use a window of at most " +
                      std::to_string(16 / group.operand_arity()));
  }
  auto universe = build_universe(group, cfg.variant, cfg.polarity);
  auto control = generate_control_operands(group, universe, SearchBudget{cfg.budget, cfg.seed});
  auto table = simulate(group, control.operands, cfg.polarity);
  auto cov = coverage(table, universe);
  auto redundancy = classify_all(group, cov.unsatisfied);
  std::optional<OperandSet> pet;
  if (cfg.pet_window > 0) pet = generate_pet_operands(group, cfg.pet_window);
  auto merged = merge_data_sets(group, control.operands, pet ? &*pet : nullptr);
  return GenerateResult{std::move(universe), std::move(control), std::move(table),
                        std::move(cov),      std::move(redundancy), std::move(pet),
                        std::move(merged)};
}

OperandSet baseline_operands(const InstructionGroup& group, const OperandSet* extra,
                             std::uint64_t seed, std::string* kind) {
  if (group.operand_arity() * group.width() <= 16) {
    if (kind) *kind = "exhaustive";
    return enumerate_all_operands(group);
  }
  if (kind) *kind = "sampled";
  constexpr std::size_t kSamples = 65536;
  std::set<OperandTuple> all;
  if (extra) {
    for (std::size_t i = 0; i < extra->instruction_count(); ++i) {
      all.insert((*extra)[i].begin(), (*extra)[i].end());
    }
  }
  std::mt19937_64 rng(row_seed(seed, 0xBA5E));
  const std::uint32_t mask = group.mask();
  while (all.size() < kSamples) {
    const std::uint64_t r = rng();
    const auto a = static_cast<std::uint32_t>(r) & mask;
    const auto b = static_cast<std::uint32_t>(r >> 32) & mask;
    all.insert(group.operand_arity() == 1 ? OperandTuple(a, group.width())
                                          : OperandTuple(a, b, group.width()));
  }
  std::vector<OperandTuple> list(all.begin(), all.end());
  return OperandSet(OperandSetKind::kMerged, group,
                    std::vector<std::vector<OperandTuple>>(group.size(), list));
}

namespace {

void count_values(OracleGrade& g, std::span<const FaultSite> faults) {
  for (auto x : g.report.undetected) {
    if (faults[x].value == StuckAt::kZero) {
      ++g.undetected_sa0;
    } else {
      ++g.undetected_sa1;
    }
  }
}

std::vector<FaultSite> select_faults(const EdnfCircuit& circuit, FaultValues which) {
  std::vector<FaultSite> out;
  for (const auto& s : enumerate_faults(circuit)) {
    if (which == FaultValues::kSa0 && s.value != StuckAt::kZero) continue;
    if (which == FaultValues::kSa1 && s.value != StuckAt::kOne) continue;
    out.push_back(s);
  }
  return out;
}

}  // namespace

VerifyResult run_verify(const InstructionGroup& group, const GateTestSet& test,
                        const RunConfig& cfg, const OperandSet* operands) {
  if (cfg.polarity != Polarity::kStandard) {
    throw ConfigError("the gate-level oracle models the standard polarity only");
  }
  if (test.instruction_count() != group.size() || test.width() != group.width()) {
    throw ContractError("test set does not match group '" + group.name() + "' width " +
                        std::to_string(group.width()));
  }
  std::string baseline_kind;
  const OperandSet maximal = baseline_operands(group, operands, cfg.seed, &baseline_kind);
  const GateTestSet maximal_test = GateTestSet::from_operands(group, maximal);

  const EdnfCircuit circuit = build_circuit(group);
  const FaultGrader grader(circuit, test);
  std::optional<FaultGrader> base;
  auto baseline = [&]() -> const FaultGrader& {
    if (!base) base.emplace(circuit, maximal_test);
    return *base;
  };

  VerifyResult result;

  const auto faults = select_faults(circuit, cfg.faults);
  result.single.report = grade(grader, circuit, faults);
  result.single.baseline = baseline_kind;
  for (auto x : result.single.report.undetected) {
    if (baseline().detects(faults[x])) {
      result.single.non_redundant_undetected.push_back(describe(faults[x], circuit));
    }
  }
  count_values(result.single, faults);

  std::vector<std::vector<FaultSite>> sets;
  if (cfg.mf_samples > 0) {
    for (int card : {2, 3}) {
      auto s = sample_multiple_faults(circuit, card, cfg.mf_samples, cfg.seed + static_cast<std::uint64_t>(card));
      sets.insert(sets.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
    }
  }
  result.multiple.report = grade_multiple(grader, circuit, sets);
  result.multiple.baseline = baseline_kind;
  for (auto x : result.multiple.report.undetected) {
    if (baseline().detects(std::span<const FaultSite>(sets[x]))) {
      result.multiple.non_redundant_undetected.push_back(
          describe(std::span<const FaultSite>(sets[x]), circuit));
    }
  }

  std::vector<BridgeFault> bridges;
  for (const auto& b : all_bridges(circuit)) {
    if (std::find(cfg.bridge_models.begin(), cfg.bridge_models.end(), b.model) !=
        cfg.bridge_models.end()) {
      bridges.push_back(b);
    }
  }
  result.bridge.report = grade_bridges(grader, bridges);
  result.bridge.baseline = baseline_kind;
  for (auto x : result.bridge.report.undetected) {
    if (baseline().detects(bridges[x])) {
      result.bridge.non_redundant_undetected.push_back(describe(bridges[x]));
    }
  }

  if (!group.factored_form().empty()) {
    const EdnfCircuit fc = build_factored_circuit(group);
    const FaultGrader fgrader(fc, test);
    std::optional<FaultGrader> fbase;
    const auto ffaults = select_faults(fc, cfg.faults);
    OracleGrade g;
    g.report = grade(fgrader, fc, ffaults);
    g.baseline = baseline_kind;
    for (auto x : g.report.undetected) {
      if (!fbase) fbase.emplace(fc, maximal_test);
      if (fbase->detects(ffaults[x])) g.non_redundant_undetected.push_back(describe(ffaults[x], fc));
    }
    count_values(g, ffaults);
    g.report.mode = "single";
    result.factored = std::move(g);
  }
  return result;
}

nlohmann::ordered_json oracle_to_json(const OracleGrade& grade) {
  auto j = grade_to_json(grade.report);
  j["coverage_percent"] =
      grade.report.total == 0
          ? 100.0
          : 100.0 * static_cast<double>(grade.report.detected) / static_cast<double>(grade.report.total);
  j["baseline"] = grade.baseline;
  j["redundant_undetected"] =
      grade.report.undetected.size() - grade.non_redundant_undetected.size();
  j["non_redundant_undetected"] = grade.non_redundant_undetected;
  if (grade.report.mode == "single") {
    j["undetected_sa0"] = grade.undetected_sa0;
    j["undetected_sa1"] = grade.undetected_sa1;
  }
  return j;
}

}  // namespace sbst
