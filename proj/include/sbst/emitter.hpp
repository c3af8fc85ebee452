#pragma once

// Self-test program composition: one looped template per instruction over
// a shared operand pool, emitted as MIPS-like assembly plus a manifest of
// expected results.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sbst/isa.hpp"
#include "sbst/operands.hpp"

namespace sbst {

struct EmitOptions {
  std::string format = "mips";
  /// Store every result in addition to folding it into the signature.
  bool full_stores = false;
};

struct TestCase {
  std::size_t instruction;
  OperandTuple operands;
  std::uint32_t expected;
};

inline constexpr std::uint32_t kSignatureSeed = 0x5B57C0DEu;

constexpr std::uint32_t fold_signature(std::uint32_t sig, std::uint32_t y) noexcept {
  return ((sig << 1) | (sig >> 31)) ^ y;
}

struct TestProgram {
  std::string group;
  int width = 0;
  OperandSetKind kind = OperandSetKind::kMerged;
  std::vector<std::string> mnemonics;
  std::vector<OperandTuple> pool;  ///< stored tuples, first-appearance order
  /// Per-instruction indices into the pool; empty when every instruction
  /// walks the whole pool.
  std::vector<std::vector<std::size_t>> index;
  std::vector<TestCase> cases;  ///< execution order
  bool full_stores = false;
  std::uint32_t signature = kSignatureSeed;
  std::string assembly;

  nlohmann::ordered_json manifest() const;
};

struct PatternCounts {
  std::size_t stored = 0;
  std::size_t executed = 0;
};

/// Throws ContractError on a group/width mismatch and ConfigError for an
/// unsupported format.
TestProgram emit_program(const InstructionGroup& group, const OperandSet& operands,
                         const EmitOptions& options = {});

PatternCounts pattern_counts(const TestProgram& program) noexcept;

std::uint32_t self_check_signature(const TestProgram& program) noexcept;
/// Recomputes the signature from the "cases" of a manifest.
std::uint32_t self_check_signature(const nlohmann::json& manifest);

/// Rebuilds the operand set from the .data section of emitted assembly.
OperandSet parse_data_section(std::string_view assembly, const InstructionGroup& group);

}  // namespace sbst
