#pragma once

// Run configuration and the generate / verify / emit stages behind the CLI.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sbst/constraints.hpp"
#include "sbst/ednf.hpp"
#include "sbst/emitter.hpp"
#include "sbst/fault_sim.hpp"
#include "sbst/isa.hpp"
#include "sbst/operands.hpp"
#include "sbst/redundancy.hpp"

namespace sbst {

inline constexpr const char* kToolVersion = "1.0.0";

/// Which single stuck-at values verify grades.
enum class FaultValues : std::uint8_t { kBoth, kSa0, kSa1 };

struct RunConfig {
  std::string group = "demo3";  ///< builtin name or group file path
  std::optional<int> width;     ///< builtin default 8; file default its own width
  Variant variant = Variant::kFull;
  Polarity polarity = Polarity::kStandard;
  std::uint64_t seed = 1;
  std::size_t budget = 1000;
  int pet_window = 3;  ///< 0 disables PET
  std::size_t mf_samples = 1000;
  std::vector<BridgeModel> bridge_models{BridgeModel::kWiredAnd, BridgeModel::kWiredOr};
  FaultValues faults = FaultValues::kBoth;
  std::string out = "sbst-out";
  bool full_stores = false;
  std::string operands;  ///< verify/emit input; default <out>/operands_merged.json
  std::string stimuli;   ///< verify: explicit gate-level stimuli file
  std::string format = "mips";

  /// Canonical JSON of every field except "out".
  nlohmann::json canonical() const;
  /// 16 hex digits of FNV-1a over canonical().dump().
  std::string hash() const;
};

/// Applies the keys of a config object; throws ConfigError on unknown keys
/// or bad values.
void apply_config(RunConfig& cfg, const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

/// Builtin name first, then a group file. Throws ConfigError.
InstructionGroup resolve_group(const RunConfig& cfg);

struct GenerateResult {
  ConstraintUniverse universe;
  ControlOperands control;
  FaultTable table;
  CoverageReport coverage;
  RedundancySummary redundancy;
  std::optional<OperandSet> pet;
  OperandSet merged;
};

GenerateResult run_generate(const InstructionGroup& group, const RunConfig& cfg);

/// Grade of one fault class together with the maximal-set baseline.
struct OracleGrade {
  GradeReport report;
  std::string baseline;  ///< "exhaustive" or "sampled"
  /// Undetected by the test set but detected by the baseline.
  std::vector<std::string> non_redundant_undetected;
  std::size_t undetected_sa0 = 0;
  std::size_t undetected_sa1 = 0;
};

struct VerifyResult {
  OracleGrade single;
  OracleGrade multiple;
  OracleGrade bridge;
  std::optional<OracleGrade> factored;

  bool passed() const noexcept {
    return single.non_redundant_undetected.empty() &&
           (!factored || factored->non_redundant_undetected.empty());
  }
};

/// Maximal operand set: every tuple when arity*m <= 16, otherwise the
/// union of `extra` with 65536 seeded random tuples.
OperandSet baseline_operands(const InstructionGroup& group, const OperandSet* extra,
                             std::uint64_t seed, std::string* kind = nullptr);

VerifyResult run_verify(const InstructionGroup& group, const GateTestSet& test,
                        const RunConfig& cfg, const OperandSet* operands = nullptr);

nlohmann::ordered_json oracle_to_json(const OracleGrade& grade);

}  // namespace sbst
