#include "sbst/redundancy.hpp"

#include <algorithm>
#include <random>

#include "sbst/error.hpp"
#include "sbst/operands.hpp"

namespace sbst {

namespace {

constexpr std::size_t kSearchDraws = 4096;

class Target {
 public:
  Target(const InstructionGroup& g, const BitConstraint& c)
      : g_(g), c_(c), mask_(g.mask()), bit_(1u << (c.bit - 1)) {}

  bool holds(std::uint32_t a, std::uint32_t b) const noexcept {
    const std::uint32_t yi = g_.eval(c_.row, a, b);
    if (c_.kind == ConstraintKind::kC1) return (c1_bits(yi, mask_, c_.polarity) & bit_) != 0;
    const std::uint32_t yj = g_.eval(c_.col, a, b);
    return (c2_bits(yi, yj, mask_, c_.polarity) & bit_) != 0;
  }

 private:
  const InstructionGroup& g_;
  BitConstraint c_;
  std::uint32_t mask_;
  std::uint32_t bit_;
};

OperandTuple make_tuple(const InstructionGroup& g, std::uint32_t a, std::uint32_t b) {
  return g.operand_arity() == 1 ? OperandTuple(a, g.width()) : OperandTuple(a, b, g.width());
}

// Enumerates every assignment of the listed bit positions of each operand,
// other bits held at 0.
std::optional<OperandTuple> enumerate(const InstructionGroup& g, const Target& t,
                                      const std::vector<int>& positions) {
  const int arity = g.operand_arity();
  const int c = static_cast<int>(positions.size());
  const std::uint64_t count = 1ull << (arity * c);
  for (std::uint64_t v = 0; v < count; ++v) {
    std::uint32_t words[2] = {0, 0};
    for (int o = 0; o < arity; ++o) {
      for (int x = 0; x < c; ++x) {
        if ((v >> (o * c + x)) & 1u) words[o] |= 1u << (positions[static_cast<std::size_t>(x)] - 1);
      }
    }
    if (t.holds(words[0], words[1])) return make_tuple(g, words[0], words[1]);
  }
  return std::nullopt;
}

std::optional<OperandTuple> search(const InstructionGroup& g, const Target& t,
                                   const BitConstraint& c) {
  const std::uint64_t seed =
      row_seed(0x5EA2C4ull + static_cast<std::uint64_t>(c.bit),
               c.row * 131 + (c.kind == ConstraintKind::kC1 ? 0 : c.col + 1));
  std::mt19937_64 rng(seed);
  const std::uint32_t mask = g.mask();
  for (std::size_t draw = 0; draw < kSearchDraws; ++draw) {
    const std::uint64_t r = rng();
    const auto a = static_cast<std::uint32_t>(r) & mask;
    const auto b = static_cast<std::uint32_t>(r >> 32) & mask;
    if (t.holds(a, b)) return make_tuple(g, a, g.operand_arity() == 1 ? 0 : b);
  }
  return std::nullopt;
}

std::vector<int> all_bits(int width) {
  std::vector<int> v(static_cast<std::size_t>(width));
  for (int k = 1; k <= width; ++k) v[static_cast<std::size_t>(k - 1)] = k;
  return v;
}

}  // namespace

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::kRedundantProven: return "REDUNDANT_PROVEN";
    case Verdict::kSatisfiableUncovered: return "SATISFIABLE_UNCOVERED";
    case Verdict::kUnknown: return "UNKNOWN";
  }
  return "?";
}

std::vector<int> dependence_cone(Semantics s, int k, int width) {
  switch (s) {
    case Semantics::kAnd:
    case Semantics::kOr:
    case Semantics::kXor:
    case Semantics::kNor:
    case Semantics::kMov:
    case Semantics::kCmp:
      return {k};
    case Semantics::kAdd:
    case Semantics::kSub: {
      std::vector<int> v(static_cast<std::size_t>(k));
      for (int x = 1; x <= k; ++x) v[static_cast<std::size_t>(x - 1)] = x;
      return v;
    }
    case Semantics::kLui:
      if (k > lui_shift(width)) return {k - lui_shift(width)};
      return {};
    case Semantics::kSlt:
    case Semantics::kSltu:
      if (k > 1) return {};
      return all_bits(width);
    case Semantics::kSll:
    case Semantics::kSrl:
    case Semantics::kSra:
      return all_bits(width);
  }
  return all_bits(width);
}

RedundancyVerdict classify(const InstructionGroup& group, const BitConstraint& constraint,
                           int proof_width_limit) {
  const int m = group.width();
  if (constraint.row >= group.size() || constraint.bit < 1 || constraint.bit > m ||
      (constraint.kind == ConstraintKind::kC2 &&
       (constraint.col >= group.size() || constraint.col == constraint.row))) {
    throw ContractError("constraint does not belong to the group");
  }
  const Target target(group, constraint);
  RedundancyVerdict out{constraint, Verdict::kUnknown, 0, std::nullopt, "none"};

  if (m <= proof_width_limit) {
    out.proof_width = m;
    out.method = "exhaustive";
    out.witness = enumerate(group, target, all_bits(m));
    out.verdict = out.witness ? Verdict::kSatisfiableUncovered : Verdict::kRedundantProven;
    return out;
  }

  if (auto w = search(group, target, constraint)) {
    out.verdict = Verdict::kSatisfiableUncovered;
    out.witness = w;
    out.method = "search";
    return out;
  }

  std::vector<int> cone = dependence_cone(group[constraint.row].semantics, constraint.bit, m);
  if (constraint.kind == ConstraintKind::kC2) {
    const auto other = dependence_cone(group[constraint.col].semantics, constraint.bit, m);
    cone.insert(cone.end(), other.begin(), other.end());
    std::sort(cone.begin(), cone.end());
    cone.erase(std::unique(cone.begin(), cone.end()), cone.end());
  }
  if (static_cast<int>(cone.size()) <= proof_width_limit) {
    out.proof_width = static_cast<int>(cone.size());
    out.method = "cone";
    out.witness = enumerate(group, target, cone);
    out.verdict = out.witness ? Verdict::kSatisfiableUncovered : Verdict::kRedundantProven;
    return out;
  }

  // y_i == y_j everywhere, so y_i bit 0 with y_j bit 1 never happens.
  if (constraint.kind == ConstraintKind::kC2 &&
      group[constraint.row].semantics == group[constraint.col].semantics) {
    out.verdict = Verdict::kRedundantProven;
    out.proof_width = m;
    out.method = "identical";
  }
  return out;
}

RedundancySummary classify_all(const InstructionGroup& group,
                               std::span<const BitConstraint> unsatisfied,
                               int proof_width_limit) {
  RedundancySummary summary;
  summary.verdicts.reserve(unsatisfied.size());
  for (const auto& c : unsatisfied) {
    auto v = classify(group, c, proof_width_limit);
    switch (v.verdict) {
      case Verdict::kRedundantProven: ++summary.proven_redundant; break;
      case Verdict::kSatisfiableUncovered: ++summary.satisfiable; break;
      case Verdict::kUnknown: ++summary.unknown; break;
    }
    summary.verdicts.push_back(std::move(v));
  }
  return summary;
}

nlohmann::ordered_json redundancy_to_json(const RedundancySummary& summary,
                                          const InstructionGroup& group, std::size_t satisfied,
                                          std::size_t total) {
  nlohmann::ordered_json j;
  j["proven_redundant"] = summary.proven_redundant;
  j["satisfiable_uncovered"] = summary.satisfiable;
  j["unknown"] = summary.unknown;
  const std::size_t adjusted = summary.adjusted_total(total);
  j["adjusted_total"] = adjusted;
  j["adjusted_percent"] =
      adjusted == 0 ? 100.0 : 100.0 * static_cast<double>(satisfied) / static_cast<double>(adjusted);
  auto& list = j["verdicts"] = nlohmann::ordered_json::array();
  for (const auto& v : summary.verdicts) {
    nlohmann::ordered_json item;
    item["constraint"] = describe(v.constraint, group);
    item["verdict"] = to_string(v.verdict);
    item["method"] = v.method;
    item["proof_width"] = v.proof_width;
    if (v.witness) {
      auto w = nlohmann::ordered_json::array();
      for (int o = 0; o < v.witness->arity(); ++o) {
        w.push_back(format_hex((*v.witness)[static_cast<std::size_t>(o)], group.width()));
      }
      item["witness"] = std::move(w);
    } else {
      item["witness"] = nullptr;
    }
    list.push_back(std::move(item));
  }
  return j;
}

}  // namespace sbst
