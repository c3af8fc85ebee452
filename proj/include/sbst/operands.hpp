#pragma once

// Operand sets: deterministic control-test operands found by seeded random
// search, pseudo-exhaustive (PET) data-path operands, and their union.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sbst/constraints.hpp"
#include "sbst/isa.hpp"

namespace sbst {

enum class OperandSetKind : std::uint8_t { kControl, kPet, kMerged };

std::string_view to_string(OperandSetKind k) noexcept;

class OperandSet {
 public:
  OperandSet(OperandSetKind kind, const InstructionGroup& group,
             std::vector<std::vector<OperandTuple>> per_instruction);

  OperandSetKind kind() const noexcept { return kind_; }
  const std::string& group_name() const noexcept { return group_; }
  int width() const noexcept { return width_; }
  const std::vector<std::string>& mnemonics() const noexcept { return mnemonics_; }
  std::size_t instruction_count() const noexcept { return per_instruction_.size(); }
  const std::vector<OperandTuple>& operator[](std::size_t i) const {
    return per_instruction_.at(i);
  }

  /// Sum of list sizes over all instructions.
  std::size_t total_tuples() const noexcept;
  /// Sorted distinct tuples across all instructions.
  std::vector<OperandTuple> distinct_tuples() const;

  bool belongs_to(const InstructionGroup& group) const noexcept;
  /// Throws ContractError when the set was not built for `group`.
  void require_group(const InstructionGroup& group) const;

  nlohmann::ordered_json to_json() const;
  /// Throws ParseError on malformed input, ContractError on group mismatch.
  static OperandSet from_json(const nlohmann::json& j, const InstructionGroup& group);
  static OperandSet load(const std::filesystem::path& path, const InstructionGroup& group);

  bool operator==(const OperandSet&) const = default;

 private:
  OperandSetKind kind_;
  std::string group_;
  int width_;
  std::vector<std::string> mnemonics_;
  std::vector<std::vector<OperandTuple>> per_instruction_;
};

struct SearchBudget {
  /// Candidate draws allowed per outstanding constraint of a row.
  std::size_t max_candidates = 1000;
  std::uint64_t rng_seed = 1;
};

struct ControlOperands {
  OperandSet operands;
  std::vector<BitConstraint> unsatisfied;
};

/// Greedy keep-if-useful random search per row instruction, followed by a
/// pruning pass so every kept tuple is load-bearing. Besides the universe
/// constraints, each row also tracks a zero-observation target per bit
/// (y_i bit inactive at least once), which C2 implies whenever any C2 of
/// that bit is satisfiable.
ControlOperands generate_control_operands(const InstructionGroup& group,
                                          const ConstraintUniverse& universe,
                                          const SearchBudget& budget);

/// Per-row RNG seed derived from (seed, row).
std::uint64_t row_seed(std::uint64_t seed, std::size_t row) noexcept;

/// All 2^(arity*window) local combinations, each replicated periodically
/// across the word, so every aligned window sees every combination.
OperandSet generate_pet_operands(const InstructionGroup& group, int window = 3);

/// Union of every control list (and the PET tuples), deduplicated and
/// sorted, assigned to every instruction.
OperandSet merge_data_sets(const InstructionGroup& group, const OperandSet& control,
                           const OperandSet* pet = nullptr);

/// Every operand tuple of the group width (2^(arity*m) tuples).
OperandSet enumerate_all_operands(const InstructionGroup& group);

}  // namespace sbst
