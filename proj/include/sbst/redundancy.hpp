#pragma once

// Classification of unsatisfied constraints into provably redundant
// (no operand tuple can satisfy them) and merely uncovered ones.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sbst/constraints.hpp"
#include "sbst/isa.hpp"

namespace sbst {

enum class Verdict : std::uint8_t { kRedundantProven, kSatisfiableUncovered, kUnknown };

std::string_view to_string(Verdict v) noexcept;

struct RedundancyVerdict {
  BitConstraint constraint;
  Verdict verdict = Verdict::kUnknown;
  /// Operand bits per word enumerated by the proof (0 when none ran).
  int proof_width = 0;
  std::optional<OperandTuple> witness;
  /// "exhaustive", "search", "cone", "identical" or "none".
  std::string method;
};

inline constexpr int kDefaultProofWidthLimit = 10;

/// Operand bit positions (1-based, applied to every operand word) on which
/// output bit k of `s` can depend. Empty when the bit is constant.
std::vector<int> dependence_cone(Semantics s, int k, int width);

/// Exhaustive enumeration when width <= limit; otherwise a seeded witness
/// search, then enumeration of the dependence cone when it has at most
/// `limit` bits. Falls back to kUnknown.
RedundancyVerdict classify(const InstructionGroup& group, const BitConstraint& constraint,
                           int proof_width_limit = kDefaultProofWidthLimit);

struct RedundancySummary {
  std::vector<RedundancyVerdict> verdicts;
  std::size_t proven_redundant = 0;
  std::size_t satisfiable = 0;
  std::size_t unknown = 0;

  /// Coverage denominator with proven-redundant constraints removed.
  std::size_t adjusted_total(std::size_t total) const noexcept {
    return total - proven_redundant;
  }
};

RedundancySummary classify_all(const InstructionGroup& group,
                               std::span<const BitConstraint> unsatisfied,
                               int proof_width_limit = kDefaultProofWidthLimit);

nlohmann::ordered_json redundancy_to_json(const RedundancySummary& summary,
                                          const InstructionGroup& group, std::size_t satisfied,
                                          std::size_t total);

}  // namespace sbst
