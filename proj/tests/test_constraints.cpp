#include <doctest.h>

#include "helpers.hpp"
#include "sbst/constraints.hpp"
#include "sbst/error.hpp"

using namespace sbst;

TEST_CASE("universe sizes") {
  const auto demo = builtin_group("demo3", 8);
  const auto full = build_universe(demo);
  CHECK(full.c1_count() == 24);
  CHECK(full.c2_count() == 48);
  CHECK(model_size(full) == 96);

  const auto t2 = build_universe(testing::five_op_group());
  CHECK(t2.c1_count() == 30);
  CHECK(t2.c2_count() == 120);
  CHECK(model_size(t2) == 360);

  const auto reduced = build_universe(demo, Variant::kReduced);
  CHECK(reduced.c1_count() == 24);
  CHECK(reduced.c2_count() == 32);
  CHECK(model_size(reduced) == 3 * 8 * 2);
  for (const auto& c : reduced.constraints()) {
    if (c.kind == ConstraintKind::kC2) {
      CHECK(hamming_distance(demo[c.row].code, demo[c.col].code) == 1);
    }
  }
}

TEST_CASE("universe is sorted and searchable") {
  const auto demo = builtin_group("demo3", 4);
  const auto u = build_universe(demo);
  CHECK(std::is_sorted(u.constraints().begin(), u.constraints().end()));
  CHECK(u.contains(BitConstraint::c2(0, 2, 3)));
  CHECK_FALSE(u.contains(BitConstraint::c2(0, 2, 5)));
  CHECK(u.row_constraints(1).size() == 4 + 2 * 4);
  CHECK(u.matches(demo));
  CHECK_FALSE(u.matches(builtin_group("demo3", 8)));
}

TEST_CASE("check_c1") {
  CHECK(check_c1(DataWord(0b0100, 4), 3));
  CHECK_FALSE(check_c1(DataWord(0b0100, 4), 1));
  for (int k = 1; k <= 4; ++k) CHECK(check_c1(DataWord(0, 4), k, Polarity::kInverted));
  CHECK_THROWS_AS(check_c1(DataWord(0, 4), 5), ContractError);
}

TEST_CASE("check_c2") {
  // First SA1 stimulus of the demo3 fixture: y1=0, y2=1, y3=1.
  const DataWord y1(0, 1), y2(1, 1), y3(1, 1);
  CHECK(check_c2(y1, y2, 1));
  CHECK(check_c2(y1, y3, 1));
  CHECK_FALSE(check_c2(DataWord(1, 1), DataWord(1, 1), 1));
  CHECK(check_c2(DataWord(0b10, 2), DataWord(0b01, 2), 1));
  CHECK_FALSE(check_c2(DataWord(0b10, 2), DataWord(0b01, 2), 2));
  CHECK(check_c2(DataWord(0b10, 2), DataWord(0b01, 2), 2, Polarity::kInverted));
  CHECK_THROWS_AS(check_c2(DataWord(0, 2), DataWord(0, 3), 1), ContractError);
  CHECK_THROWS_AS(check_c2(DataWord(0, 2), DataWord(0, 2), 3), ContractError);
}

TEST_CASE("bitwise predicates agree with the scalar checks") {
  for (std::uint32_t a = 0; a < 16; ++a) {
    for (std::uint32_t b = 0; b < 16; ++b) {
      for (Polarity p : {Polarity::kStandard, Polarity::kInverted}) {
        for (int k = 1; k <= 4; ++k) {
          const std::uint32_t bit = 1u << (k - 1);
          CHECK(((c1_bits(a, 0xF, p) & bit) != 0) == check_c1(DataWord(a, 4), k, p));
          CHECK(((c2_bits(a, b, 0xF, p) & bit) != 0) ==
                check_c2(DataWord(a, 4), DataWord(b, 4), k, p));
        }
      }
    }
  }
}

TEST_CASE("descriptors and tags") {
  const auto g = testing::five_op_group();
  CHECK(describe(BitConstraint::c2(1, 2, 1), g) == "C2[ADD<SUB,k=1]");
  CHECK(describe(BitConstraint::c1(0, 3), g) == "C1[MOV,k=3]");
  CHECK(describe(BitConstraint::c2(1, 2, 1, Polarity::kInverted), g) == "C2[ADD>SUB,k=1]");
  CHECK(parse_variant("reduced") == Variant::kReduced);
  CHECK(parse_polarity("inverted") == Polarity::kInverted);
  CHECK_THROWS_AS(parse_variant("partial"), ConfigError);
  CHECK_THROWS_AS(parse_polarity("up"), ConfigError);
}
