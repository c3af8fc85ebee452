#pragma once

// Instruction group under test: control encodings, operand arity and the
// word-level semantics of each ALU function.

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace sbst {

inline constexpr int kMaxWidth = 32;
inline constexpr int kMaxControlWidth = 16;
inline constexpr std::size_t kMaxInstructions = 64;

/// Mask with the low `width` bits set. `width` must be in 1..32.
constexpr std::uint32_t width_mask(int width) noexcept {
  return width >= 32 ? 0xFFFFFFFFu : ((1u << width) - 1u);
}

/// m-bit data value. Bits are indexed 1..m, LSB first.
class DataWord {
 public:
  DataWord(std::uint32_t value, int width);

  std::uint32_t value() const noexcept { return value_; }
  int width() const noexcept { return width_; }
  bool bit(int k) const;

  auto operator<=>(const DataWord&) const = default;

 private:
  int width_;
  std::uint32_t value_;
};

/// One or two operand words of a common width.
class OperandTuple {
 public:
  OperandTuple(std::uint32_t a, int width);
  OperandTuple(std::uint32_t a, std::uint32_t b, int width);
  static OperandTuple of(std::span<const DataWord> words);

  int arity() const noexcept { return arity_; }
  int width() const noexcept { return width_; }
  std::uint32_t operator[](std::size_t i) const { return words_.at(i); }
  /// Second operand, or 0 for a unary tuple.
  std::uint32_t second() const noexcept { return arity_ == 2 ? words_[1] : 0u; }
  DataWord word(std::size_t i) const;

  auto operator<=>(const OperandTuple&) const = default;

 private:
  std::uint8_t width_;
  std::uint8_t arity_;
  std::array<std::uint32_t, 2> words_{};
};

/// Opcode field c_p..c_1 selecting one instruction.
struct ControlCode {
  std::uint32_t bits = 0;
  int width = 0;

  /// Control line j (1-based, c_1 is the LSB).
  bool line(int j) const noexcept { return ((bits >> (j - 1)) & 1u) != 0; }
  /// MSB-first binary string, e.g. "01" for not-c2 and c1.
  std::string to_string() const;
  static ControlCode parse(std::string_view text);

  auto operator<=>(const ControlCode&) const = default;
};

int hamming_distance(ControlCode a, ControlCode b) noexcept;

/// Closed semantics catalog. CMP is a bitwise equality compare (XNOR).
enum class Semantics : std::uint8_t {
  kAdd, kSub, kAnd, kOr, kXor, kNor, kSlt, kSltu, kSll, kSrl, kSra, kMov, kLui, kCmp,
};

std::span<const Semantics> semantics_catalog() noexcept;
std::string_view semantics_name(Semantics s) noexcept;
std::optional<Semantics> parse_semantics(std::string_view tag);
int semantics_arity(Semantics s) noexcept;

/// Raw word-level evaluation; operands must already be masked to `width`.
/// Unary semantics ignore `b`. Shift amounts are taken modulo `width`.
std::uint32_t evaluate(Semantics s, std::uint32_t a, std::uint32_t b, int width) noexcept;

/// Left shift applied by the LUI-style semantics (upper half load).
constexpr int lui_shift(int width) noexcept { return width / 2; }

struct InstructionSpec {
  std::string mnemonic;
  ControlCode code;
  int arity = 2;
  Semantics semantics = Semantics::kAdd;
};

/// y = f(d), truncated to the tuple width. A unary instruction fed a pair
/// ignores the second word. Throws ContractError on an arity shortfall.
DataWord execute(const InstructionSpec& spec, const OperandTuple& d);

class InstructionGroup {
 public:
  /// Validates distinct codes/mnemonics, n >= 2, p >= ceil(log2 n), widths.
  InstructionGroup(std::string name, int width, int control_width,
                   std::vector<InstructionSpec> instructions, std::string factored = {});

  const std::string& name() const noexcept { return name_; }
  int width() const noexcept { return width_; }
  int control_width() const noexcept { return control_width_; }
  std::size_t size() const noexcept { return instructions_.size(); }
  const InstructionSpec& operator[](std::size_t i) const { return instructions_.at(i); }
  std::span<const InstructionSpec> instructions() const noexcept { return instructions_; }
  std::vector<std::string> mnemonics() const;
  std::vector<ControlCode> codes() const;

  /// Arity of the shared operand pool (max arity over the group).
  int operand_arity() const noexcept { return operand_arity_; }
  std::uint32_t mask() const noexcept { return width_mask(width_); }

  std::optional<std::size_t> find(std::string_view mnemonic) const;
  /// Optional multi-level form of the control structure, e.g.
  /// "~c2 & y1 | c2 & (~c1 & y2 | c1 & y3)".
  const std::string& factored_form() const noexcept { return factored_; }

  /// Checked execution of instruction i (width and arity contract).
  DataWord execute(std::size_t i, const OperandTuple& d) const;
  /// Unchecked hot-path evaluation of instruction i.
  std::uint32_t eval(std::size_t i, std::uint32_t a, std::uint32_t b) const noexcept {
    return evaluate(instructions_[i].semantics, a, b, width_);
  }

  /// Same instructions and codes at another data width.
  InstructionGroup with_width(int width) const;

 private:
  std::string name_;
  int width_;
  int control_width_;
  std::vector<InstructionSpec> instructions_;
  std::string factored_;
  int operand_arity_ = 1;
};

/// Shipped groups: "alu-logic", "alu-arith", "alu-compare-shift", "demo3".
InstructionGroup builtin_group(std::string_view name, int width);
std::span<const std::string_view> builtin_group_names() noexcept;

InstructionGroup group_from_json(const nlohmann::json& j);
nlohmann::ordered_json group_to_json(const InstructionGroup& g);
InstructionGroup load_group(const std::filesystem::path& path);

/// "0x" + zero-padded uppercase hex sized to the width.
std::string format_hex(std::uint32_t value, int width);
std::uint32_t parse_hex(std::string_view text, int width);

}  // namespace sbst
