#pragma once

#include <string>
#include <vector>

#include "sbst/isa.hpp"

namespace testing {

inline std::string data_file(const std::string& name) { return std::string(SBST_DATA_DIR) + "/" + name; }

inline sbst::InstructionSpec spec(const std::string& mn, const std::string& code, sbst::Semantics s) {
  return {mn, sbst::ControlCode::parse(code), sbst::semantics_arity(s), s};
}

inline sbst::InstructionGroup five_op_group(int width = 6) {
  using sbst::Semantics;
  return sbst::InstructionGroup("five-op", width, 3,
                                {spec("MOV", "001", Semantics::kMov), spec("ADD", "010", Semantics::kAdd),
                                 spec("SUB", "011", Semantics::kSub), spec("CMP", "100", Semantics::kCmp),
                                 spec("AND", "101", Semantics::kAnd)});
}

/// ADD, SUB, OR, AND, XOR: the pairs discussed in the redundancy table.
inline sbst::InstructionGroup dominance_group(int width) {
  using sbst::Semantics;
  return sbst::InstructionGroup("dominance", width, 3,
                                {spec("ADD", "001", Semantics::kAdd), spec("SUB", "010", Semantics::kSub),
                                 spec("OR", "011", Semantics::kOr), spec("AND", "100", Semantics::kAnd),
                                 spec("XOR", "101", Semantics::kXor)});
}

}  // namespace testing
