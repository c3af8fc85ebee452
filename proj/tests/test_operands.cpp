#include <doctest.h>

#include <set>

#include "helpers.hpp"
#include "sbst/error.hpp"
#include "sbst/fault_sim.hpp"
#include "sbst/operands.hpp"

using namespace sbst;

namespace {

// Every constraint of the universe that some width-4 tuple can satisfy.
std::set<BitConstraint> satisfiable_at_width4(const InstructionGroup& g, const ConstraintUniverse& u) {
  const auto all = enumerate_all_operands(g);
  const auto table = simulate(g, all, u.polarity());
  std::set<BitConstraint> out;
  for (const auto& c : u.constraints()) {
    if (table.satisfied(c)) out.insert(c);
  }
  return out;
}

}  // namespace

TEST_CASE("control operands satisfy every satisfiable demo3 constraint") {
  const auto g = builtin_group("demo3", 4);
  const auto u = build_universe(g);
  const auto sat = satisfiable_at_width4(g, u);
  const auto r = generate_control_operands(g, u, SearchBudget{1000, 7});
  for (const auto& c : r.unsatisfied) CHECK(sat.count(c) == 0);
  CHECK(r.unsatisfied.size() == u.size() - sat.size());
  CHECK(r.operands.kind() == OperandSetKind::kControl);
}

TEST_CASE("OR<AND stays unsatisfied regardless of budget") {
  using testing::spec;
  const InstructionGroup g("or-and", 8, 1, {spec("OR", "0", Semantics::kOr), spec("AND", "1", Semantics::kAnd)});
  const auto u = build_universe(g);
  for (std::size_t budget : {1u, 100u, 5000u}) {
    const auto r = generate_control_operands(g, u, SearchBudget{budget, 3});
    for (int k = 1; k <= 8; ++k) {
      CHECK(std::find(r.unsatisfied.begin(), r.unsatisfied.end(), BitConstraint::c2(0, 1, k)) !=
            r.unsatisfied.end());
    }
  }
}

TEST_CASE("tiny budget leaves constraints open, reproducibly") {
  const auto g = builtin_group("alu-arith", 16);
  const auto u = build_universe(g);
  const auto a = generate_control_operands(g, u, SearchBudget{1, 99});
  const auto b = generate_control_operands(g, u, SearchBudget{1, 99});
  CHECK_FALSE(a.unsatisfied.empty());
  CHECK(a.unsatisfied == b.unsatisfied);
  CHECK(a.operands == b.operands);
  CHECK(a.operands.to_json().dump() == b.operands.to_json().dump());
}

TEST_CASE("every kept control tuple is load-bearing") {
  const auto g = testing::five_op_group();
  const auto u = build_universe(g);
  const auto r = generate_control_operands(g, u, SearchBudget{1000, 5});
  const auto full = simulate(g, r.operands);
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t drop = 0; drop < r.operands[i].size(); ++drop) {
      auto lists = std::vector<std::vector<OperandTuple>>(g.size());
      for (std::size_t h = 0; h < g.size(); ++h) lists[h] = r.operands[h];
      lists[i].erase(lists[i].begin() + static_cast<std::ptrdiff_t>(drop));
      const auto reduced = simulate(g, OperandSet(OperandSetKind::kControl, g, lists));
      // Dropping a tuple loses a constraint or a zero observation of the row.
      bool lost = reduced.c1(i) != full.c1(i);
      for (std::size_t j = 0; j < g.size() && !lost; ++j) {
        if (j != i && reduced.entry(i, j) != full.entry(i, j)) lost = true;
      }
      if (!lost) {
        std::uint32_t zero_full = 0, zero_reduced = 0;
        for (const auto& d : r.operands[i]) zero_full |= ~g.eval(i, d[0], d.second()) & g.mask();
        for (const auto& d : lists[i]) zero_reduced |= ~g.eval(i, d[0], d.second()) & g.mask();
        lost = zero_full != zero_reduced;
      }
      CHECK(lost);
    }
  }
}

TEST_CASE("row seeds differ per row and seed") {
  CHECK(row_seed(1, 0) != row_seed(1, 1));
  CHECK(row_seed(1, 0) != row_seed(2, 0));
  CHECK(row_seed(5, 3) == row_seed(5, 3));
}

TEST_CASE("PET window 1 gives all four bit pairs") {
  const auto g = builtin_group("alu-logic", 8);
  const auto pet = generate_pet_operands(g, 1);
  CHECK(pet[0].size() == 4);
  for (int k = 1; k <= 8; ++k) {
    std::set<int> seen;
    for (const auto& d : pet[0]) seen.insert(static_cast<int>(((d[0] >> (k - 1)) & 1u) | (((d[1] >> (k - 1)) & 1u) << 1)));
    CHECK(seen.size() == 4);
  }
}

TEST_CASE("PET window errors") {
  CHECK_THROWS_AS(generate_pet_operands(builtin_group("alu-logic", 4), 5), ContractError);
  CHECK_THROWS_AS(generate_pet_operands(builtin_group("alu-logic", 16), 9), ContractError);
  CHECK_THROWS_AS(generate_pet_operands(builtin_group("alu-logic", 8), 0), ContractError);
}

TEST_CASE("merge") {
  const auto g = builtin_group("demo3", 8);
  const auto r = generate_control_operands(g, build_universe(g), SearchBudget{});
  const auto merged = merge_data_sets(g, r.operands);
  CHECK(merged.kind() == OperandSetKind::kMerged);
  CHECK(merged[0] == merged[1]);
  CHECK(merged[1] == merged[2]);
  CHECK(merged[0] == r.operands.distinct_tuples());

  const OperandSet empty_pet(OperandSetKind::kPet, g, std::vector<std::vector<OperandTuple>>(3));
  CHECK(merge_data_sets(g, r.operands, &empty_pet) == merged);

  const auto other = builtin_group("alu-logic", 8);
  CHECK_THROWS_AS(merge_data_sets(other, r.operands), ContractError);
}

TEST_CASE("operand set JSON round trip and errors") {
  const auto g = builtin_group("demo3", 8);
  const auto r = generate_control_operands(g, build_universe(g), SearchBudget{});
  const auto j = nlohmann::json(r.operands.to_json());
  CHECK(OperandSet::from_json(j, g) == r.operands);

  auto broken = j;
  broken["per_instruction"]["MOV"][0][0] = "0xZZ";
  CHECK_THROWS_AS(OperandSet::from_json(broken, g), ParseError);
  broken = j;
  broken.erase("kind");
  CHECK_THROWS_AS(OperandSet::from_json(broken, g), ParseError);
  CHECK_THROWS_AS(OperandSet::from_json(j, builtin_group("demo3", 4)), ContractError);
  CHECK_THROWS_AS(OperandSet::load("/nonexistent.json", g), ParseError);
}

TEST_CASE("full enumeration") {
  const auto g = builtin_group("demo3", 4);
  const auto all = enumerate_all_operands(g);
  CHECK(all[0].size() == 256);
  CHECK_THROWS_AS(enumerate_all_operands(builtin_group("demo3", 16)), ContractError);
}
