#pragma once

// High-level control fault model: per-bit data constraints C1 (result bit
// can be driven active) and C2 (result bit inactive while another
// instruction's result bit is active).

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "sbst/isa.hpp"

namespace sbst {

/// Standard: C1 wants bit = 1, C2 wants (y_i bit, y_j bit) = (0, 1).
/// Inverted swaps both constants.
enum class Polarity : std::uint8_t { kStandard, kInverted };
enum class Variant : std::uint8_t { kFull, kReduced };
enum class ConstraintKind : std::uint8_t { kC1, kC2 };

std::string_view to_string(Polarity p) noexcept;
std::string_view to_string(Variant v) noexcept;
Polarity parse_polarity(std::string_view text);
Variant parse_variant(std::string_view text);

struct BitConstraint {
  ConstraintKind kind = ConstraintKind::kC1;
  std::size_t row = 0;
  std::size_t col = kNoColumn;  ///< kNoColumn for C1
  int bit = 1;                  ///< 1-based, LSB first
  Polarity polarity = Polarity::kStandard;

  static constexpr std::size_t kNoColumn = static_cast<std::size_t>(-1);

  static BitConstraint c1(std::size_t row, int bit, Polarity p = Polarity::kStandard) {
    return {ConstraintKind::kC1, row, kNoColumn, bit, p};
  }
  static BitConstraint c2(std::size_t row, std::size_t col, int bit,
                          Polarity p = Polarity::kStandard) {
    return {ConstraintKind::kC2, row, col, bit, p};
  }

  auto operator<=>(const BitConstraint&) const = default;
};

/// Stable descriptor: "C1[ADD,k=3]" or "C2[ADD<SUB,k=1]" (">" when inverted).
std::string describe(const BitConstraint& c, const InstructionGroup& group);

class ConstraintUniverse {
 public:
  std::size_t instruction_count() const noexcept { return n_; }
  int width() const noexcept { return m_; }
  int control_width() const noexcept { return p_; }
  Variant variant() const noexcept { return variant_; }
  Polarity polarity() const noexcept { return polarity_; }
  const std::vector<BitConstraint>& constraints() const noexcept { return constraints_; }
  std::size_t size() const noexcept { return constraints_.size(); }
  std::size_t c1_count() const noexcept;
  std::size_t c2_count() const noexcept;

  /// Constraints whose row is `row`, in universe order.
  std::vector<BitConstraint> row_constraints(std::size_t row) const;
  bool contains(const BitConstraint& c) const;
  bool matches(const InstructionGroup& group) const noexcept;

 private:
  friend ConstraintUniverse build_universe(const InstructionGroup&, Variant, Polarity);
  std::size_t n_ = 0;
  int m_ = 0;
  int p_ = 0;
  Variant variant_ = Variant::kFull;
  Polarity polarity_ = Polarity::kStandard;
  std::vector<BitConstraint> constraints_;  // sorted
};

/// Full: n*m C1 and n*(n-1)*m C2. Reduced: same C1, C2 only for code pairs
/// at Hamming distance 1.
ConstraintUniverse build_universe(const InstructionGroup& group, Variant variant = Variant::kFull,
                                  Polarity polarity = Polarity::kStandard);

bool check_c1(const DataWord& y_i, int k, Polarity polarity = Polarity::kStandard);
bool check_c2(const DataWord& y_i, const DataWord& y_j, int k,
              Polarity polarity = Polarity::kStandard);

/// Bitwise forms of the two predicates over all m bits at once.
constexpr std::uint32_t c1_bits(std::uint32_t y_i, std::uint32_t mask, Polarity p) noexcept {
  return p == Polarity::kStandard ? (y_i & mask) : (~y_i & mask);
}
constexpr std::uint32_t c2_bits(std::uint32_t y_i, std::uint32_t y_j, std::uint32_t mask,
                                Polarity p) noexcept {
  return p == Polarity::kStandard ? (~y_i & y_j & mask) : (y_i & ~y_j & mask);
}

/// Model size n(n-1)mp for the full variant and n*m*p for the reduced one.
std::uint64_t model_size(const ConstraintUniverse& universe) noexcept;

}  // namespace sbst
