#include <doctest.h>

#include "helpers.hpp"
#include "sbst/error.hpp"
#include "sbst/fault_sim.hpp"

using namespace sbst;

namespace {

FaultTable saturated_five_op() {
  const auto g = testing::five_op_group();
  const auto r = generate_control_operands(g, build_universe(g), SearchBudget{2000, 1});
  return simulate(g, r.operands);
}

}  // namespace

TEST_CASE("saturated five-op fault table") {
  const auto g = testing::five_op_group();
  const auto t = saturated_five_op();
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(bit_string(t.c1(i), 6) == "111111");
    for (std::size_t j = 0; j < 5; ++j) {
      if (i == j) continue;
      CAPTURE(g[i].mnemonic);
      CAPTURE(g[j].mnemonic);
      std::string expected = "111111";
      if ((g[i].mnemonic == "ADD" && g[j].mnemonic == "SUB") ||
          (g[i].mnemonic == "SUB" && g[j].mnemonic == "ADD")) {
        expected = "111110";
      }
      if ((g[i].mnemonic == "MOV" || g[i].mnemonic == "CMP") && g[j].mnemonic == "AND") {
        expected = "000000";
      }
      CHECK(bit_string(t.entry(i, j), 6) == expected);
    }
  }
}

TEST_CASE("five-op coverage leaves exactly the zero cells") {
  const auto g = testing::five_op_group();
  const auto report = coverage(saturated_five_op(), build_universe(g));
  std::vector<std::string> names;
  for (const auto& c : report.unsatisfied) names.push_back(describe(c, g));
  std::vector<std::string> expected = {"C2[ADD<SUB,k=1]", "C2[SUB<ADD,k=1]"};
  for (int k = 1; k <= 6; ++k) {
    expected.push_back("C2[MOV<AND,k=" + std::to_string(k) + "]");
    expected.push_back("C2[CMP<AND,k=" + std::to_string(k) + "]");
  }
  std::sort(names.begin(), names.end());
  std::sort(expected.begin(), expected.end());
  CHECK(names == expected);
  CHECK(report.total == 150);
  CHECK(report.satisfied == 136);
}

TEST_CASE("empty operand set gives an all-zero table") {
  const auto g = builtin_group("demo3", 8);
  const OperandSet empty(OperandSetKind::kControl, g, std::vector<std::vector<OperandTuple>>(3));
  const auto t = simulate(g, empty);
  CHECK(t == FaultTable(3, 8));
  const auto report = coverage(t, build_universe(g));
  CHECK(report.satisfied == 0);
  CHECK(report.percent == 0.0);
}

TEST_CASE("single tuple table matches hand evaluation") {
  const auto g = builtin_group("demo3", 4);
  // MOV a=0b0101, AND with b=0b0011 -> 0b0001, XOR -> 0b0110.
  const OperandTuple d(0b0101, 0b0011, 4);
  const OperandSet set(OperandSetKind::kControl, g, {{d}, {}, {}});
  const auto t = simulate(g, set);
  CHECK(t.c1(0) == 0b0101);
  CHECK(t.entry(0, 1) == 0b0000);  // ~0101 & 0001
  CHECK(t.entry(0, 2) == 0b0010);  // ~0101 & 0110
  CHECK(t.c1(1) == 0);
  CHECK(t.entry(1, 0) == 0);
  CHECK_THROWS_AS(t.entry(1, 1), ContractError);
}

TEST_CASE("inverted polarity swaps the predicates") {
  const auto g = builtin_group("demo3", 4);
  const OperandTuple d(0b0101, 0b0011, 4);
  const OperandSet set(OperandSetKind::kControl, g, {{d}, {}, {}});
  const auto t = simulate(g, set, Polarity::kInverted);
  CHECK(t.c1(0) == 0b1010);
  CHECK(t.entry(0, 1) == 0b0100);  // 0101 & ~0001
  CHECK_THROWS_AS(coverage(t, build_universe(g)), ContractError);
}

TEST_CASE("table diff") {
  FaultTable a(3, 4), b(3, 4);
  CHECK(diff_tables(a, b).empty());
  b.set_entry(1, 2, 0b0100);
  const auto d = diff_tables(a, b);
  REQUIRE(d.size() == 1);
  CHECK(d[0].kind == ConstraintKind::kC2);
  CHECK(d[0].row == 1);
  CHECK(d[0].col == 2);
  CHECK(d[0].bit == 3);
  CHECK_FALSE(d[0].a);
  CHECK(d[0].b);
  CHECK_THROWS_AS(diff_tables(a, FaultTable(3, 8)), ContractError);
}

TEST_CASE("adding PET tuples only adds ones") {
  const auto g = builtin_group("alu-arith", 8);
  const auto r = generate_control_operands(g, build_universe(g), SearchBudget{50, 11});
  const auto pet = generate_pet_operands(g, 2);
  const auto before = simulate(g, merge_data_sets(g, r.operands));
  const auto after = simulate(g, merge_data_sets(g, r.operands, &pet));
  for (const auto& d : diff_tables(before, after)) {
    CHECK_FALSE(d.a);
    CHECK(d.b);
  }
}

TEST_CASE("grid and JSON rendering") {
  const auto g = builtin_group("demo3", 2);
  FaultTable t(3, 2);
  t.set_entry(0, 1, 0b01);
  t.set_c1(2, 0b11);
  const auto j = table_to_json(t, g);
  CHECK(j["entries"][0][1] == "01");
  CHECK(j["entries"][0][0].is_null());
  CHECK(j["c1"][2] == "11");
  const auto grid = table_to_grid(t, g);
  CHECK(grid.find("MOV  -    01") != std::string::npos);
}
