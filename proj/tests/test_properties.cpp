#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "helpers.hpp"
#include "reference_semantics.hpp"
#include "sbst/fault_sim.hpp"
#include "sbst/pipeline.hpp"

using namespace sbst;

namespace {

// Independent maximal fault table: explicit loops over every tuple, bit and
// column using the reference semantics.
FaultTable brute_force_table(const InstructionGroup& g) {
  const int m = g.width();
  const std::size_t n = g.size();
  FaultTable t(n, m);
  std::vector<std::uint32_t> c1(n, 0), e(n * n, 0);
  for (std::uint32_t a = 0; a < (1u << m); ++a) {
    for (std::uint32_t b = 0; b < (1u << m); ++b) {
      for (std::size_t i = 0; i < n; ++i) {
        const auto yi = ref::eval(g[i].semantics, a, b, m);
        for (int k = 0; k < m; ++k) {
          if (ref::bit(yi, k)) c1[i] |= 1u << k;
          for (std::size_t j = 0; j < n; ++j) {
            const auto yj = ref::eval(g[j].semantics, a, b, m);
            if (j != i && !ref::bit(yi, k) && ref::bit(yj, k)) e[i * n + j] |= 1u << k;
          }
        }
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    t.set_c1(i, c1[i]);
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) t.set_entry(i, j, e[i * n + j]);
    }
  }
  return t;
}

std::set<std::vector<std::uint32_t>> window_combos(const std::vector<OperandTuple>& tuples, int start,
                                                   int w, int width) {
  std::set<std::vector<std::uint32_t>> seen;
  for (const auto& d : tuples) {
    std::vector<std::uint32_t> key;
    for (int o = 0; o < d.arity(); ++o) {
      std::uint32_t v = 0;
      for (int t = 0; t < w; ++t) v |= ((d[static_cast<std::size_t>(o)] >> ((start + t) % width)) & 1u) << t;
      key.push_back(v);
    }
    seen.insert(key);
  }
  return seen;
}

}  // namespace

TEST_CASE("maximal table equals the brute-force table at m=4") {
  for (auto name : builtin_group_names()) {
    const auto g = builtin_group(name, 4);
    CAPTURE(name);
    CHECK(simulate(g, enumerate_all_operands(g)) == brute_force_table(g));
  }
  const auto t2 = testing::five_op_group(4);
  CHECK(simulate(t2, enumerate_all_operands(t2)) == brute_force_table(t2));
}

TEST_CASE("control operands reach the maximal table on satisfiable constraints") {
  for (auto name : builtin_group_names()) {
    const auto g = builtin_group(name, 4);
    CAPTURE(name);
    const auto u = build_universe(g);
    const auto r = generate_control_operands(g, u, SearchBudget{});
    const auto maximal = simulate(g, enumerate_all_operands(g));
    const auto got = simulate(g, r.operands);
    for (const auto& c : u.constraints()) CHECK(got.satisfied(c) == maximal.satisfied(c));
  }
}

TEST_CASE("simulation ignores tuple order") {
  const auto g = builtin_group("alu-compare-shift", 8);
  const auto r = generate_control_operands(g, build_universe(g), SearchBudget{});
  std::vector<std::vector<OperandTuple>> lists;
  std::mt19937_64 rng(3);
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto l = r.operands[i];
    std::shuffle(l.begin(), l.end(), rng);
    lists.push_back(std::move(l));
  }
  CHECK(simulate(g, OperandSet(OperandSetKind::kControl, g, lists)) == simulate(g, r.operands));
}

TEST_CASE("generation is deterministic per seed") {
  const auto g = testing::five_op_group(8);
  const auto u = build_universe(g);
  const auto a = generate_control_operands(g, u, SearchBudget{500, 17});
  const auto b = generate_control_operands(g, u, SearchBudget{500, 17});
  CHECK(a.operands.to_json().dump() == b.operands.to_json().dump());
}

TEST_CASE("reduced model is implied by the full model") {
  const auto g = builtin_group("alu-logic", 8);
  const auto full = generate_control_operands(g, build_universe(g), SearchBudget{});
  const auto table = simulate(g, full.operands);
  const auto universe = build_universe(g, Variant::kReduced);
  for (const auto& c : universe.constraints()) {
    CHECK(table.satisfied(c) == (classify(g, c).verdict != Verdict::kRedundantProven));
  }
}

TEST_CASE("PET windows are locally exhaustive, aligned and sliding") {
  for (int width : {8, 16}) {
    for (int w : {1, 2, 3}) {
      const auto g = builtin_group("alu-logic", width);
      const auto pet = generate_pet_operands(g, w);
      const std::size_t want = std::size_t{1} << (2 * w);
      CHECK(pet[0].size() == want);
      for (int start = 0; start + w <= width; ++start) {
        CAPTURE(width);
        CAPTURE(w);
        CAPTURE(start);
        CHECK(window_combos(pet[0], start, w, width).size() == want);
      }
    }
  }
}

TEST_CASE("oracle passes on demo3 at m=4 with the default pipeline") {
  RunConfig cfg;
  cfg.width = 4;
  const auto g = resolve_group(cfg);
  const auto gen = run_generate(g, cfg);
  const auto r = run_verify(g, GateTestSet::from_operands(g, gen.merged), cfg, &gen.merged);
  CHECK(r.passed());
  CHECK(r.single.baseline == "exhaustive");
  CHECK(r.bridge.non_redundant_undetected.empty());
  CHECK(r.multiple.non_redundant_undetected.empty());
}

TEST_CASE("sampled baseline beyond 16 operand bits") {
  const auto g = builtin_group("alu-logic", 12);
  std::string kind;
  const auto base = baseline_operands(g, nullptr, 1, &kind);
  CHECK(kind == "sampled");
  CHECK(base[0].size() == 65536);
  CHECK(baseline_operands(g, nullptr, 1) == base);
}
