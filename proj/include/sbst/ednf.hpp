#pragma once

// Implementation-free gate-level oracle. Each data bit k of the execute
// stage output is modelled as an AND-OR selector
//   y_k = OR_i ( AND_j lit_ij(c) & y_i,k )
// over the p global control lines, optionally replaced by a user-supplied
// factored (multi-level) form. Faults are injected on gate inputs and on
// the global control lines, and graded bit-parallel against a test set.

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sbst/isa.hpp"
#include "sbst/operands.hpp"

namespace sbst {

enum class GateType : std::uint8_t { kAnd, kOr };

/// Input of a slice gate: control literal c_j / ~c_j, data y_h, or a gate.
struct SliceSource {
  enum class Kind : std::uint8_t { kLiteral, kData, kGate };
  Kind kind = Kind::kLiteral;
  int index = 0;          ///< line j (1-based), instruction h (0-based) or gate id
  bool inverted = false;  ///< literals only

  std::string to_string() const;
};

struct SliceGate {
  GateType type = GateType::kAnd;
  std::vector<SliceSource> inputs;
};

class EdnfCircuit {
 public:
  /// Two-level form: gate i is the AND term of instruction i (control
  /// literals c_p..c_1, then the data input), the last gate is the OR.
  static EdnfCircuit two_level(std::vector<ControlCode> codes, int width, int control_width);
  /// Multi-level form parsed from e.g. "~c2 & y1 | c2 & (~c1 & y2 | c1 & y3)".
  /// Throws ConfigError when it does not select y_i under code_i.
  static EdnfCircuit factored(std::vector<ControlCode> codes, int width, int control_width,
                              std::string_view expression);

  bool is_two_level() const noexcept { return two_level_; }
  std::size_t instruction_count() const noexcept { return codes_.size(); }
  int width() const noexcept { return width_; }
  int control_width() const noexcept { return control_width_; }
  const std::vector<ControlCode>& codes() const noexcept { return codes_; }
  const std::vector<SliceGate>& gates() const noexcept { return gates_; }
  std::size_t output_gate() const noexcept { return gates_.size() - 1; }

  /// One-slice evaluation with plain booleans (no faults).
  bool evaluate(std::uint32_t control, std::uint64_t data_column) const;
  /// Expression text, e.g. "~c2 & c1 & y1 | c2 & ~c1 & y2 | c2 & c1 & y3".
  std::string expression() const;

 private:
  EdnfCircuit() = default;
  std::string gate_expression(std::size_t g) const;

  bool two_level_ = true;
  int width_ = 1;
  int control_width_ = 1;
  std::vector<ControlCode> codes_;
  std::vector<SliceGate> gates_;  // topological, output last
};

EdnfCircuit build_circuit(const InstructionGroup& group);
/// Throws ConfigError when the group has no factored form.
EdnfCircuit build_factored_circuit(const InstructionGroup& group);

enum class StuckAt : std::uint8_t { kZero, kOne };

enum class FaultLocation : std::uint8_t {
  kAndControl,   ///< control literal input of a two-level AND term
  kAndData,      ///< data input of a two-level AND term
  kControlLine,  ///< global control line before fan-out
  kGateInput,    ///< any input of a factored-form gate
};

struct FaultSite {
  FaultLocation location = FaultLocation::kAndControl;
  int gate = -1;  ///< gate id (term index for two-level ANDs)
  int pin = -1;   ///< input position within the gate
  int bit = 0;    ///< data bit k, 1-based; 0 for control lines
  int line = 0;   ///< control line j for kAndControl / kControlLine
  StuckAt value = StuckAt::kZero;

  auto operator<=>(const FaultSite&) const = default;
};

/// Stable descriptor, e.g. "AND[i=2,k=5].ctrl[j=1].SA1", "AND[i=1,k=3].data.SA0",
/// "CTRL[j=2].SA0", "OR[g=4,k=1].in[0]=AND[g=1].SA1".
std::string describe(const FaultSite& site, const EdnfCircuit& circuit);

/// True for fault sites on control inputs (literal pins and global lines).
bool is_control_site(const FaultSite& site, const EdnfCircuit& circuit);

/// Two-level: SA0/SA1 on every AND input plus the p global lines,
/// 2*(n*m*(p+1) + p) sites. Factored: every gate input plus the lines.
std::vector<FaultSite> enumerate_faults(const EdnfCircuit& circuit);

enum class BridgeModel : std::uint8_t { kWiredAnd, kWiredOr };

struct BridgeFault {
  int line_a = 1;
  int line_b = 2;
  BridgeModel model = BridgeModel::kWiredAnd;

  auto operator<=>(const BridgeFault&) const = default;
};

std::string describe(const BridgeFault& bridge);
/// Every unordered pair of control lines under both wired models.
std::vector<BridgeFault> all_bridges(const EdnfCircuit& circuit);

/// Seeded sample of distinct fault-site sets over control inputs. Sites in
/// a set are on distinct locations. Returns every set when `count` reaches
/// the number of possible sets.
std::vector<std::vector<FaultSite>> sample_multiple_faults(const EdnfCircuit& circuit,
                                                           int cardinality, std::size_t count,
                                                           std::uint64_t seed);

/// Stimuli (code_i, y_1..y_n). Entries carry a mask of the instructions
/// whose code is applied with that data vector.
class GateTestSet {
 public:
  GateTestSet(std::size_t instructions, int width);

  void add(std::uint64_t instruction_mask, std::span<const std::uint32_t> y);
  void add_for(std::size_t instruction, std::span<const std::uint32_t> y) {
    add(std::uint64_t{1} << instruction, y);
  }

  std::size_t instruction_count() const noexcept { return n_; }
  int width() const noexcept { return width_; }
  std::size_t entry_count() const noexcept { return masks_.size(); }
  std::size_t stimulus_count() const noexcept;
  std::uint64_t mask(std::size_t e) const { return masks_.at(e); }
  std::span<const std::uint32_t> y(std::size_t e) const {
    return std::span<const std::uint32_t>(y_).subspan(e * n_, n_);
  }

  /// Stimulus (code_i, {f_h(d)}) for every instruction i and d in D_i.
  static GateTestSet from_operands(const InstructionGroup& group, const OperandSet& operands);
  /// {"width", "stimuli": [{"code" or "mnemonic", "y": [hex, ...]}]}
  static GateTestSet from_json(const nlohmann::json& j, const InstructionGroup& group);

 private:
  std::size_t n_;
  int width_;
  std::vector<std::uint64_t> masks_;
  std::vector<std::uint32_t> y_;
};

/// Test set compiled into per-bit pattern words against one circuit.
/// A stimulus only influences bit k of the output through
/// (code, {y_h,k}), so each slice keeps the distinct pairs only.
class FaultGrader {
 public:
  FaultGrader(const EdnfCircuit& circuit, const GateTestSet& test);

  bool detects(const FaultSite& site) const;
  bool detects(std::span<const FaultSite> sites) const;
  bool detects(const BridgeFault& bridge) const;

  std::size_t pattern_count(int bit) const;

 private:
  struct Slice {
    std::size_t words = 0;
    std::uint64_t last_mask = 0;
    std::vector<std::uint64_t> ctrl;  // p x words
    std::vector<std::uint64_t> data;  // n x words
    std::vector<std::uint64_t> good;  // words
  };
  struct Injection;

  bool differs(const Slice& s, const Injection& inj) const;
  bool run(const Injection& inj) const;
  void check_site(const FaultSite& site) const;

  const EdnfCircuit* circuit_;
  std::vector<Slice> slices_;
};

struct GradeReport {
  std::string mode;  ///< "single", "multiple" or "bridge"
  std::size_t total = 0;
  std::size_t detected = 0;
  std::vector<std::size_t> undetected;  ///< indices into the graded list
  std::vector<std::string> undetected_names;
};

GradeReport grade(const EdnfCircuit& circuit, std::span<const FaultSite> faults,
                  const GateTestSet& test);
GradeReport grade(const FaultGrader& grader, const EdnfCircuit& circuit,
                  std::span<const FaultSite> faults);
GradeReport grade_multiple(const FaultGrader& grader, const EdnfCircuit& circuit,
                           std::span<const std::vector<FaultSite>> sets);
GradeReport grade_bridges(const FaultGrader& grader, std::span<const BridgeFault> bridges);

std::string describe(std::span<const FaultSite> sites, const EdnfCircuit& circuit);

nlohmann::ordered_json grade_to_json(const GradeReport& report);

}  // namespace sbst
