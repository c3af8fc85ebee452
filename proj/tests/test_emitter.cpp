#include <doctest.h>

#include "helpers.hpp"
#include "reference_semantics.hpp"
#include "sbst/emitter.hpp"
#include "sbst/error.hpp"

using namespace sbst;

namespace {

OperandSet demo_control(const InstructionGroup& g) {
  return generate_control_operands(g, build_universe(g), SearchBudget{}).operands;
}

}  // namespace

TEST_CASE("merged set: executed is n times stored") {
  const auto g = builtin_group("demo3", 8);
  const auto merged = merge_data_sets(g, demo_control(g));
  const auto prog = emit_program(g, merged);
  const auto counts = pattern_counts(prog);
  CHECK(counts.stored == merged[0].size());
  CHECK(counts.executed == 3 * counts.stored);
  CHECK(counts.stored < counts.executed);
  CHECK(prog.index.empty());
}

TEST_CASE("per-instruction sets use index tables") {
  const auto g = builtin_group("demo3", 8);
  const auto control = demo_control(g);
  const auto prog = emit_program(g, control);
  const auto counts = pattern_counts(prog);
  CHECK(counts.stored == control.distinct_tuples().size());
  CHECK(counts.executed == control.total_tuples());
  CHECK(prog.assembly.find("idx_MOV:") != std::string::npos);
}

TEST_CASE("data section round trip") {
  for (auto name : builtin_group_names()) {
    const auto g = builtin_group(name, 8);
    const auto control = demo_control(g);
    const auto pet = generate_pet_operands(g, 2);
    for (const auto& set : {control, pet, merge_data_sets(g, control, &pet)}) {
      const auto prog = emit_program(g, set);
      CHECK(parse_data_section(prog.assembly, g) == set);
    }
  }
}

TEST_CASE("empty operand set gives a valid zero-iteration program") {
  const auto g = builtin_group("demo3", 8);
  const OperandSet empty(OperandSetKind::kMerged, g, std::vector<std::vector<OperandTuple>>(3));
  const auto prog = emit_program(g, empty);
  CHECK(pattern_counts(prog).stored == 0);
  CHECK(pattern_counts(prog).executed == 0);
  CHECK(prog.signature == kSignatureSeed);
  CHECK(prog.assembly.find(".text") != std::string::npos);
  CHECK(parse_data_section(prog.assembly, g) == empty);
}

TEST_CASE("manifest expected results replay through the reference model") {
  const auto g = builtin_group("alu-compare-shift", 8);
  const auto prog = emit_program(g, merge_data_sets(g, demo_control(g)));
  const auto m = prog.manifest();
  for (const auto& c : m["cases"]) {
    const auto i = *g.find(c["mnemonic"].get<std::string>());
    const auto a = parse_hex(c["operands"][0].get<std::string>(), 8);
    const auto b = parse_hex(c["operands"][1].get<std::string>(), 8);
    CHECK(parse_hex(c["expected"].get<std::string>(), 8) == ref::eval(g[i].semantics, a, b, 8));
  }
}

TEST_CASE("signature replay and order sensitivity") {
  const auto g = builtin_group("demo3", 8);
  const auto merged = merge_data_sets(g, demo_control(g));
  const auto prog = emit_program(g, merged);
  CHECK(self_check_signature(prog) == prog.signature);
  CHECK(self_check_signature(nlohmann::json(prog.manifest())) == prog.signature);

  const InstructionGroup swapped("demo3", 8, 2, {g[2], g[1], g[0]}, g.factored_form());
  const OperandSet same(OperandSetKind::kMerged, swapped,
                        std::vector<std::vector<OperandTuple>>(3, merged[0]));
  CHECK(emit_program(swapped, same).signature != prog.signature);
  CHECK(fold_signature(fold_signature(0, 1), 2) != fold_signature(fold_signature(0, 2), 1));
}

TEST_CASE("emission is byte-identical and each instruction has one template") {
  const auto g = builtin_group("alu-logic", 8);
  const auto set = merge_data_sets(g, demo_control(g));
  const auto a = emit_program(g, set);
  const auto b = emit_program(g, set);
  CHECK(a.assembly == b.assembly);
  CHECK(a.manifest().dump() == b.manifest().dump());
  for (const auto& ins : g.instructions()) {
    const std::string label = "\nt_" + ins.mnemonic + ":";
    const auto first = a.assembly.find(label);
    CHECK(first != std::string::npos);
    CHECK(a.assembly.find(label, first + 1) == std::string::npos);
  }
}

TEST_CASE("full stores") {
  const auto g = builtin_group("demo3", 8);
  const auto set = merge_data_sets(g, demo_control(g));
  const auto plain = emit_program(g, set);
  const auto full = emit_program(g, set, EmitOptions{"mips", true});
  CHECK(plain.manifest()["observation"] == "signature");
  CHECK(full.manifest()["observation"] == "full");
  CHECK(full.manifest()["cases"].size() == pattern_counts(full).executed);
  CHECK(full.assembly.find("results:") != std::string::npos);
  CHECK(plain.assembly.find("results:") == std::string::npos);
}

TEST_CASE("emitter errors") {
  const auto g = builtin_group("demo3", 8);
  const auto set = demo_control(g);
  CHECK_THROWS_AS(emit_program(g, set, EmitOptions{"riscv", false}), ConfigError);
  CHECK_THROWS_AS(emit_program(builtin_group("demo3", 4), set), ContractError);
  CHECK_THROWS_AS(parse_data_section("  .data\nset_kind: .asciiz \"merged\"\n", g), ParseError);
}
