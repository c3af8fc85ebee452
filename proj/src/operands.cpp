#include "sbst/operands.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <random>

#include "sbst/error.hpp"

namespace sbst {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

OperandSetKind parse_kind(std::string_view s) {
  if (s == "control") return OperandSetKind::kControl;
  if (s == "pet") return OperandSetKind::kPet;
  if (s == "merged") return OperandSetKind::kMerged;
  throw ParseError("unknown operand set kind '" + std::string(s) + "'");
}

std::vector<std::uint32_t> special_values(int width) {
  const std::uint32_t mask = width_mask(width);
  std::vector<std::uint32_t> v = {0u, mask, 0x55555555u & mask, 0xAAAAAAAAu & mask};
  for (int t = 0; t < width; ++t) v.push_back(1u << t);
  return v;
}

class CandidateSource {
 public:
  CandidateSource(std::uint64_t seed, int width, int arity)
      : rng_(seed), width_(width), arity_(arity), specials_(special_values(width)) {}

  OperandTuple next() {
    const std::uint32_t a = word();
    if (arity_ == 1) return OperandTuple(a, width_);
    return OperandTuple(a, word(), width_);
  }

 private:
  // One in four words comes from the special-value list.
  std::uint32_t word() {
    const std::uint64_t r = rng_();
    if ((r & 3u) == 0) return specials_[(r >> 2) % specials_.size()];
    return static_cast<std::uint32_t>(r >> 16) & width_mask(width_);
  }

  std::mt19937_64 rng_;
  int width_;
  int arity_;
  std::vector<std::uint32_t> specials_;
};

// Bit masks of the targets of one row: C1 bits, C2 bits per column, and
// zero-observation bits.
struct RowTargets {
  std::uint32_t c1 = 0;
  std::vector<std::uint32_t> c2;
  std::uint32_t zero = 0;

  bool empty() const noexcept {
    return c1 == 0 && zero == 0 &&
           std::all_of(c2.begin(), c2.end(), [](std::uint32_t v) { return v == 0; });
  }
};

RowTargets hits(const RowTargets& wanted, std::span<const std::uint32_t> y, std::size_t row,
                std::uint32_t mask, Polarity p) {
  RowTargets h;
  const std::uint32_t yi = y[row];
  h.c1 = c1_bits(yi, mask, p) & wanted.c1;
  h.zero = ~c1_bits(yi, mask, p) & mask & wanted.zero;
  h.c2.resize(wanted.c2.size());
  for (std::size_t j = 0; j < wanted.c2.size(); ++j) {
    if (wanted.c2[j] != 0) h.c2[j] = c2_bits(yi, y[j], mask, p) & wanted.c2[j];
  }
  return h;
}

void clear(RowTargets& from, const RowTargets& h) {
  from.c1 &= ~h.c1;
  from.zero &= ~h.zero;
  for (std::size_t j = 0; j < h.c2.size(); ++j) from.c2[j] &= ~h.c2[j];
}

void outputs(const InstructionGroup& g, const OperandTuple& d, std::vector<std::uint32_t>& y) {
  for (std::size_t h = 0; h < g.size(); ++h) y[h] = g.eval(h, d[0], d.second());
}

// Drops tuples whose every hit target is also hit by another kept tuple.
std::vector<OperandTuple> prune(const InstructionGroup& g, std::size_t row,
                                const RowTargets& satisfied, std::vector<OperandTuple> kept,
                                Polarity p) {
  const std::size_t n = g.size();
  const int m = g.width();
  const std::uint32_t mask = g.mask();
  // Target index layout: [0, m) C1, [m, 2m) zero, then m per column.
  std::vector<int> count(static_cast<std::size_t>(m) * (n + 2), 0);
  std::vector<std::vector<std::size_t>> covered(kept.size());
  std::vector<std::uint32_t> y(n);
  auto add_bits = [&](std::vector<std::size_t>& out, std::uint32_t bits, std::size_t base) {
    for (; bits != 0; bits &= bits - 1) {
      out.push_back(base + static_cast<std::size_t>(std::countr_zero(bits)));
    }
  };
  for (std::size_t t = 0; t < kept.size(); ++t) {
    outputs(g, kept[t], y);
    const RowTargets h = hits(satisfied, y, row, mask, p);
    add_bits(covered[t], h.c1, 0);
    add_bits(covered[t], h.zero, static_cast<std::size_t>(m));
    for (std::size_t j = 0; j < n; ++j) {
      add_bits(covered[t], h.c2[j], static_cast<std::size_t>(m) * (j + 2));
    }
    for (std::size_t idx : covered[t]) ++count[idx];
  }
  std::vector<OperandTuple> out;
  for (std::size_t t = 0; t < kept.size(); ++t) {
    const bool needed = std::any_of(covered[t].begin(), covered[t].end(),
                                    [&](std::size_t idx) { return count[idx] < 2; });
    if (needed) {
      out.push_back(kept[t]);
    } else {
      for (std::size_t idx : covered[t]) --count[idx];
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(OperandSetKind k) noexcept {
  switch (k) {
    case OperandSetKind::kControl: return "control";
    case OperandSetKind::kPet: return "pet";
    case OperandSetKind::kMerged: return "merged";
  }
  return "?";
}

OperandSet::OperandSet(OperandSetKind kind, const InstructionGroup& group,
                       std::vector<std::vector<OperandTuple>> per_instruction)
    : kind_(kind),
      group_(group.name()),
      width_(group.width()),
      mnemonics_(group.mnemonics()),
      per_instruction_(std::move(per_instruction)) {
  if (per_instruction_.size() != group.size()) {
    throw ContractError("operand set needs one list per instruction");
  }
  for (const auto& list : per_instruction_) {
    for (const auto& d : list) {
      if (d.width() != width_) throw ContractError("operand tuple width differs from group");
    }
  }
  if (kind_ == OperandSetKind::kMerged) {
    for (const auto& list : per_instruction_) {
      if (list != per_instruction_.front()) {
        throw ContractError("merged operand set must share one list across instructions");
      }
    }
  }
}

std::size_t OperandSet::total_tuples() const noexcept {
  std::size_t total = 0;
  for (const auto& list : per_instruction_) total += list.size();
  return total;
}

std::vector<OperandTuple> OperandSet::distinct_tuples() const {
  std::vector<OperandTuple> all;
  for (const auto& list : per_instruction_) all.insert(all.end(), list.begin(), list.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

bool OperandSet::belongs_to(const InstructionGroup& group) const noexcept {
  return group.name() == group_ && group.width() == width_ && group.mnemonics() == mnemonics_;
}

void OperandSet::require_group(const InstructionGroup& group) const {
  if (!belongs_to(group)) {
    throw ContractError("operand set for group '" + group_ + "' (width " +
                        std::to_string(width_) + ") does not match group '" + group.name() +
                        "' (width " + std::to_string(group.width()) + ")");
  }
}

nlohmann::ordered_json OperandSet::to_json() const {
  nlohmann::ordered_json j;
  j["kind"] = to_string(kind_);
  j["group"] = group_;
  j["width"] = width_;
  auto& per = j["per_instruction"] = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < per_instruction_.size(); ++i) {
    auto& list = per[mnemonics_[i]] = nlohmann::ordered_json::array();
    for (const auto& d : per_instruction_[i]) {
      auto tuple = nlohmann::ordered_json::array();
      for (int w = 0; w < d.arity(); ++w) tuple.push_back(format_hex(d[w], width_));
      list.push_back(std::move(tuple));
    }
  }
  return j;
}

OperandSet OperandSet::from_json(const nlohmann::json& j, const InstructionGroup& group) {
  try {
    const auto kind = parse_kind(j.at("kind").get<std::string>());
    const auto name = j.at("group").get<std::string>();
    const int width = j.at("width").get<int>();
    if (name != group.name() || width != group.width()) {
      throw ContractError("operand file is for group '" + name + "' width " +
                          std::to_string(width) + ", expected '" + group.name() + "' width " +
                          std::to_string(group.width()));
    }
    const auto& per = j.at("per_instruction");
    if (per.size() != group.size()) {
      throw ContractError("operand file lists " + std::to_string(per.size()) +
                          " instructions, group has " + std::to_string(group.size()));
    }
    std::vector<std::vector<OperandTuple>> lists(group.size());
    for (std::size_t i = 0; i < group.size(); ++i) {
      const auto& mn = group[i].mnemonic;
      if (!per.contains(mn)) throw ContractError("operand file lacks instruction " + mn);
      for (const auto& tuple : per.at(mn)) {
        if (!tuple.is_array() || tuple.empty() || tuple.size() > 2) {
          throw ParseError("operand tuple must hold 1 or 2 hex words");
        }
        const auto a = parse_hex(tuple[0].get<std::string>(), width);
        if (tuple.size() == 1) {
          lists[i].emplace_back(a, width);
        } else {
          lists[i].emplace_back(a, parse_hex(tuple[1].get<std::string>(), width), width);
        }
      }
    }
    return OperandSet(kind, group, std::move(lists));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed operand set: ") + e.what());
  }
}

OperandSet OperandSet::load(const std::filesystem::path& path, const InstructionGroup& group) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open operand file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("operand file " + path.string() + ": " + e.what());
  }
  return from_json(j, group);
}

std::uint64_t row_seed(std::uint64_t seed, std::size_t row) noexcept {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(row) + 1));
}

ControlOperands generate_control_operands(const InstructionGroup& group,
                                          const ConstraintUniverse& universe,
                                          const SearchBudget& budget) {
  if (!universe.matches(group)) throw ContractError("universe was built for another group");
  if (budget.max_candidates < 1) throw ContractError("search budget must be >= 1");
  const std::size_t n = group.size();
  const std::uint32_t mask = group.mask();
  const Polarity pol = universe.polarity();

  std::vector<std::vector<OperandTuple>> lists(n);
  std::vector<BitConstraint> unsatisfied;
  std::vector<std::uint32_t> y(n);

  for (std::size_t i = 0; i < n; ++i) {
    RowTargets wanted;
    wanted.c2.assign(n, 0);
    std::size_t constraint_count = 0;
    for (const auto& c : universe.row_constraints(i)) {
      const std::uint32_t bit = 1u << (c.bit - 1);
      if (c.kind == ConstraintKind::kC1) {
        wanted.c1 |= bit;
      } else {
        wanted.c2[c.col] |= bit;
      }
      ++constraint_count;
    }
    wanted.zero = mask;

    RowTargets outstanding = wanted;
    CandidateSource source(row_seed(budget.rng_seed, i), group.width(), group.operand_arity());
    std::vector<OperandTuple> kept;
    const std::size_t allowance = budget.max_candidates * std::max<std::size_t>(1, constraint_count);
    for (std::size_t draw = 0; draw < allowance && !outstanding.empty(); ++draw) {
      const OperandTuple d = source.next();
      outputs(group, d, y);
      const RowTargets h = hits(outstanding, y, i, mask, pol);
      if (h.empty()) continue;
      clear(outstanding, h);
      kept.push_back(d);
    }

    RowTargets satisfied = wanted;
    satisfied.c1 &= ~outstanding.c1;
    satisfied.zero &= ~outstanding.zero;
    for (std::size_t j = 0; j < n; ++j) satisfied.c2[j] &= ~outstanding.c2[j];
    lists[i] = prune(group, i, satisfied, std::move(kept), pol);

    for (const auto& c : universe.row_constraints(i)) {
      const std::uint32_t bit = 1u << (c.bit - 1);
      const std::uint32_t left =
          c.kind == ConstraintKind::kC1 ? outstanding.c1 : outstanding.c2[c.col];
      if ((left & bit) != 0) unsatisfied.push_back(c);
    }
  }
  return {OperandSet(OperandSetKind::kControl, group, std::move(lists)), std::move(unsatisfied)};
}

OperandSet generate_pet_operands(const InstructionGroup& group, int window) {
  const int m = group.width();
  const int arity = group.operand_arity();
  if (window < 1 || window > m) {
    throw ContractError("PET window " + std::to_string(window) + " must be in 1.." +
                        std::to_string(m));
  }
  if (arity * window > 16) {
    throw ContractError("PET window " + std::to_string(window) + " too large: 2^" +
                        std::to_string(arity * window) + " local combinations");
  }
  auto replicate = [&](std::uint32_t local) {
    std::uint32_t word = 0;
    for (int t = 0; t < m; ++t) word |= ((local >> (t % window)) & 1u) << t;
    return word;
  };
  const std::uint32_t local_mask = width_mask(window);
  std::vector<OperandTuple> patterns;
  for (std::uint32_t c = 0; c < (1u << (arity * window)); ++c) {
    const std::uint32_t a = replicate(c & local_mask);
    if (arity == 1) {
      patterns.emplace_back(a, m);
    } else {
      patterns.emplace_back(a, replicate((c >> window) & local_mask), m);
    }
  }
  return OperandSet(OperandSetKind::kPet, group,
                    std::vector<std::vector<OperandTuple>>(group.size(), patterns));
}

OperandSet merge_data_sets(const InstructionGroup& group, const OperandSet& control,
                           const OperandSet* pet) {
  control.require_group(group);
  std::vector<OperandTuple> pool = control.distinct_tuples();
  if (pet != nullptr) {
    pet->require_group(group);
    const auto extra = pet->distinct_tuples();
    pool.insert(pool.end(), extra.begin(), extra.end());
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  }
  return OperandSet(OperandSetKind::kMerged, group,
                    std::vector<std::vector<OperandTuple>>(group.size(), pool));
}

OperandSet enumerate_all_operands(const InstructionGroup& group) {
  const int m = group.width();
  const int arity = group.operand_arity();
  if (arity * m > 24) {
    throw ContractError("full enumeration of " + std::to_string(arity * m) +
                        " operand bits is infeasible");
  }
  std::vector<OperandTuple> all;
  const std::uint64_t count = 1ull << (arity * m);
  all.reserve(count);
  for (std::uint64_t v = 0; v < count; ++v) {
    const auto a = static_cast<std::uint32_t>(v & width_mask(m));
    if (arity == 1) {
      all.emplace_back(a, m);
    } else {
      all.emplace_back(a, static_cast<std::uint32_t>(v >> m), m);
    }
  }
  std::sort(all.begin(), all.end());
  return OperandSet(OperandSetKind::kMerged, group,
                    std::vector<std::vector<OperandTuple>>(group.size(), all));
}

}  // namespace sbst
