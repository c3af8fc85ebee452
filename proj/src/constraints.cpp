#include "sbst/constraints.hpp"

#include <algorithm>

#include "sbst/error.hpp"

namespace sbst {

std::string_view to_string(Polarity p) noexcept {
  return p == Polarity::kStandard ? "standard" : "inverted";
}

std::string_view to_string(Variant v) noexcept {
  return v == Variant::kFull ? "full" : "reduced";
}

Polarity parse_polarity(std::string_view text) {
  if (text == "standard") return Polarity::kStandard;
  if (text == "inverted") return Polarity::kInverted;
  throw ConfigError("polarity must be 'standard' or 'inverted', got '" + std::string(text) +
                    "'");
}

Variant parse_variant(std::string_view text) {
  if (text == "full") return Variant::kFull;
  if (text == "reduced") return Variant::kReduced;
  throw ConfigError("variant must be 'full' or 'reduced', got '" + std::string(text) + "'");
}

std::string describe(const BitConstraint& c, const InstructionGroup& group) {
  const std::string k = ",k=" + std::to_string(c.bit) + "]";
  if (c.kind == ConstraintKind::kC1) return "C1[" + group[c.row].mnemonic + k;
  const char* rel = c.polarity == Polarity::kStandard ? "<" : ">";
  return "C2[" + group[c.row].mnemonic + rel + group[c.col].mnemonic + k;
}

std::size_t ConstraintUniverse::c1_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(constraints_.begin(), constraints_.end(),
                    [](const BitConstraint& c) { return c.kind == ConstraintKind::kC1; }));
}

std::size_t ConstraintUniverse::c2_count() const noexcept {
  return constraints_.size() - c1_count();
}

std::vector<BitConstraint> ConstraintUniverse::row_constraints(std::size_t row) const {
  std::vector<BitConstraint> out;
  for (const auto& c : constraints_) {
    if (c.row == row) out.push_back(c);
  }
  return out;
}

bool ConstraintUniverse::contains(const BitConstraint& c) const {
  return std::binary_search(constraints_.begin(), constraints_.end(), c);
}

bool ConstraintUniverse::matches(const InstructionGroup& group) const noexcept {
  return group.size() == n_ && group.width() == m_ && group.control_width() == p_;
}

ConstraintUniverse build_universe(const InstructionGroup& group, Variant variant,
                                  Polarity polarity) {
  ConstraintUniverse u;
  u.n_ = group.size();
  u.m_ = group.width();
  u.p_ = group.control_width();
  u.variant_ = variant;
  u.polarity_ = polarity;
  for (std::size_t i = 0; i < u.n_; ++i) {
    for (int k = 1; k <= u.m_; ++k) u.constraints_.push_back(BitConstraint::c1(i, k, polarity));
    for (std::size_t j = 0; j < u.n_; ++j) {
      if (j == i) continue;
      if (variant == Variant::kReduced &&
          hamming_distance(group[i].code, group[j].code) != 1) {
        continue;
      }
      for (int k = 1; k <= u.m_; ++k) {
        u.constraints_.push_back(BitConstraint::c2(i, j, k, polarity));
      }
    }
  }
  std::sort(u.constraints_.begin(), u.constraints_.end());
  return u;
}

bool check_c1(const DataWord& y_i, int k, Polarity polarity) {
  const bool b = y_i.bit(k);
  return polarity == Polarity::kStandard ? b : !b;
}

bool check_c2(const DataWord& y_i, const DataWord& y_j, int k, Polarity polarity) {
  if (y_i.width() != y_j.width()) throw ContractError("check_c2: width mismatch");
  const bool a = y_i.bit(k);
  const bool b = y_j.bit(k);
  return polarity == Polarity::kStandard ? (!a && b) : (a && !b);
}

std::uint64_t model_size(const ConstraintUniverse& universe) noexcept {
  const std::uint64_t n = universe.instruction_count();
  const std::uint64_t m = static_cast<std::uint64_t>(universe.width());
  const std::uint64_t p = static_cast<std::uint64_t>(universe.control_width());
  return universe.variant() == Variant::kFull ? n * (n - 1) * m * p : n * m * p;
}

}  // namespace sbst
