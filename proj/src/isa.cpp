#include "sbst/isa.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>

#include "sbst/error.hpp"

namespace sbst {

namespace {

void check_width(int width) {
  if (width < 1 || width > kMaxWidth) {
    throw ContractError("data width must be in 1.." + std::to_string(kMaxWidth) + ", got " +
                        std::to_string(width));
  }
}

void check_fits(std::uint32_t value, int width) {
  if ((value & ~width_mask(width)) != 0) {
    throw ContractError("value " + std::to_string(value) + " does not fit in " +
                        std::to_string(width) + " bits");
  }
}

constexpr std::array kCatalog = {
    Semantics::kAdd, Semantics::kSub, Semantics::kAnd, Semantics::kOr,  Semantics::kXor,
    Semantics::kNor, Semantics::kSlt, Semantics::kSltu, Semantics::kSll, Semantics::kSrl,
    Semantics::kSra, Semantics::kMov, Semantics::kLui, Semantics::kCmp,
};

// Sign-extend an m-bit value to a signed 64-bit integer.
std::int64_t to_signed(std::uint32_t v, int width) noexcept {
  const std::uint64_t sign = 1ull << (width - 1);
  return static_cast<std::int64_t>((static_cast<std::uint64_t>(v) ^ sign)) -
         static_cast<std::int64_t>(sign);
}

constexpr std::array<std::string_view, 4> kBuiltinNames = {"alu-logic", "alu-arith",
                                                            "alu-compare-shift", "demo3"};

}  // namespace

DataWord::DataWord(std::uint32_t value, int width) : width_(width), value_(value) {
  check_width(width);
  check_fits(value, width);
}

bool DataWord::bit(int k) const {
  if (k < 1 || k > width_) {
    throw ContractError("bit index " + std::to_string(k) + " outside 1.." +
                        std::to_string(width_));
  }
  return ((value_ >> (k - 1)) & 1u) != 0;
}

OperandTuple::OperandTuple(std::uint32_t a, int width)
    : width_(static_cast<std::uint8_t>(width)), arity_(1), words_{a, 0} {
  check_width(width);
  check_fits(a, width);
}

OperandTuple::OperandTuple(std::uint32_t a, std::uint32_t b, int width)
    : width_(static_cast<std::uint8_t>(width)), arity_(2), words_{a, b} {
  check_width(width);
  check_fits(a, width);
  check_fits(b, width);
}

OperandTuple OperandTuple::of(std::span<const DataWord> words) {
  if (words.empty() || words.size() > 2) {
    throw ContractError("an operand tuple holds 1 or 2 words");
  }
  if (words.size() == 2 && words[0].width() != words[1].width()) {
    throw ContractError("operand widths differ");
  }
  if (words.size() == 1) return OperandTuple(words[0].value(), words[0].width());
  return OperandTuple(words[0].value(), words[1].value(), words[0].width());
}

DataWord OperandTuple::word(std::size_t i) const {
  if (i >= arity_) throw ContractError("operand index out of range");
  return DataWord(words_[i], width_);
}

std::string ControlCode::to_string() const {
  std::string s(static_cast<std::size_t>(width), '0');
  for (int j = 1; j <= width; ++j) {
    if (line(j)) s[static_cast<std::size_t>(width - j)] = '1';
  }
  return s;
}

ControlCode ControlCode::parse(std::string_view text) {
  if (text.empty() || text.size() > static_cast<std::size_t>(kMaxControlWidth)) {
    throw ConfigError("control code must be a binary string of length 1.." +
                      std::to_string(kMaxControlWidth));
  }
  ControlCode code{0, static_cast<int>(text.size())};
  for (char ch : text) {
    if (ch != '0' && ch != '1') {
      throw ConfigError("control code '" + std::string(text) + "' is not binary");
    }
    code.bits = (code.bits << 1) | static_cast<std::uint32_t>(ch == '1');
  }
  return code;
}

int hamming_distance(ControlCode a, ControlCode b) noexcept {
  return std::popcount(a.bits ^ b.bits);
}

std::span<const Semantics> semantics_catalog() noexcept { return kCatalog; }

std::string_view semantics_name(Semantics s) noexcept {
  switch (s) {
    case Semantics::kAdd: return "ADD";
    case Semantics::kSub: return "SUB";
    case Semantics::kAnd: return "AND";
    case Semantics::kOr: return "OR";
    case Semantics::kXor: return "XOR";
    case Semantics::kNor: return "NOR";
    case Semantics::kSlt: return "SLT";
    case Semantics::kSltu: return "SLTU";
    case Semantics::kSll: return "SLL";
    case Semantics::kSrl: return "SRL";
    case Semantics::kSra: return "SRA";
    case Semantics::kMov: return "MOV";
    case Semantics::kLui: return "LUI";
    case Semantics::kCmp: return "CMP";
  }
  return "?";
}

std::optional<Semantics> parse_semantics(std::string_view tag) {
  std::string upper(tag);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (Semantics s : kCatalog) {
    if (semantics_name(s) == upper) return s;
  }
  return std::nullopt;
}

int semantics_arity(Semantics s) noexcept {
  return (s == Semantics::kMov || s == Semantics::kLui) ? 1 : 2;
}

std::uint32_t evaluate(Semantics s, std::uint32_t a, std::uint32_t b, int width) noexcept {
  const std::uint32_t mask = width_mask(width);
  const auto shamt = static_cast<unsigned>(b % static_cast<std::uint32_t>(width));
  switch (s) {
    case Semantics::kAdd: return (a + b) & mask;
    case Semantics::kSub: return (a - b) & mask;
    case Semantics::kAnd: return a & b;
    case Semantics::kOr: return a | b;
    case Semantics::kXor: return a ^ b;
    case Semantics::kNor: return ~(a | b) & mask;
    case Semantics::kSlt: return to_signed(a, width) < to_signed(b, width) ? 1u : 0u;
    case Semantics::kSltu: return a < b ? 1u : 0u;
    case Semantics::kSll:
      return static_cast<std::uint32_t>((static_cast<std::uint64_t>(a) << shamt) & mask);
    case Semantics::kSrl: return a >> shamt;
    case Semantics::kSra:
      return static_cast<std::uint32_t>(
          static_cast<std::uint64_t>(to_signed(a, width) >> shamt) & mask);
    case Semantics::kMov: return a;
    case Semantics::kLui:
      return static_cast<std::uint32_t>((static_cast<std::uint64_t>(a) << lui_shift(width)) &
                                        mask);
    case Semantics::kCmp: return ~(a ^ b) & mask;
  }
  return 0;
}

DataWord execute(const InstructionSpec& spec, const OperandTuple& d) {
  if (d.arity() < spec.arity) {
    throw ContractError(spec.mnemonic + " needs " + std::to_string(spec.arity) +
                        " operands, got " + std::to_string(d.arity()));
  }
  return DataWord(evaluate(spec.semantics, d[0], d.second(), d.width()), d.width());
}

InstructionGroup::InstructionGroup(std::string name, int width, int control_width,
                                   std::vector<InstructionSpec> instructions,
                                   std::string factored)
    : name_(std::move(name)),
      width_(width),
      control_width_(control_width),
      instructions_(std::move(instructions)),
      factored_(std::move(factored)) {
  if (width < 1 || width > kMaxWidth) {
    throw ConfigError("group width must be in 1.." + std::to_string(kMaxWidth));
  }
  if (control_width < 1 || control_width > kMaxControlWidth) {
    throw ConfigError("control width must be in 1.." + std::to_string(kMaxControlWidth));
  }
  const std::size_t n = instructions_.size();
  if (n < 2) throw ConfigError("a group needs at least 2 instructions");
  if (n > kMaxInstructions) throw ConfigError("too many instructions in group");
  if (n > (std::size_t{1} << control_width)) {
    throw ConfigError("control width " + std::to_string(control_width) + " cannot encode " +
                      std::to_string(n) + " instructions");
  }
  std::set<std::uint32_t> seen_codes;
  std::set<std::string> seen_names;
  for (const auto& ins : instructions_) {
    if (ins.mnemonic.empty()) throw ConfigError("empty mnemonic");
    if (!seen_names.insert(ins.mnemonic).second) {
      throw ConfigError("duplicate mnemonic " + ins.mnemonic);
    }
    if (ins.code.width != control_width) {
      throw ConfigError(ins.mnemonic + ": control code width " +
                        std::to_string(ins.code.width) + " != " +
                        std::to_string(control_width));
    }
    if (!seen_codes.insert(ins.code.bits).second) {
      throw ConfigError("duplicate control code " + ins.code.to_string() + " (" +
                        ins.mnemonic + ")");
    }
    if (ins.arity != semantics_arity(ins.semantics)) {
      throw ConfigError(ins.mnemonic + ": arity " + std::to_string(ins.arity) +
                        " does not match " + std::string(semantics_name(ins.semantics)));
    }
    operand_arity_ = std::max(operand_arity_, ins.arity);
  }
}

std::vector<std::string> InstructionGroup::mnemonics() const {
  std::vector<std::string> out;
  out.reserve(size());
  for (const auto& ins : instructions_) out.push_back(ins.mnemonic);
  return out;
}

std::vector<ControlCode> InstructionGroup::codes() const {
  std::vector<ControlCode> out;
  out.reserve(size());
  for (const auto& ins : instructions_) out.push_back(ins.code);
  return out;
}

std::optional<std::size_t> InstructionGroup::find(std::string_view mnemonic) const {
  for (std::size_t i = 0; i < instructions_.size(); ++i) {
    if (instructions_[i].mnemonic == mnemonic) return i;
  }
  return std::nullopt;
}

DataWord InstructionGroup::execute(std::size_t i, const OperandTuple& d) const {
  if (i >= size()) throw ContractError("instruction index out of range");
  if (d.width() != width_) {
    throw ContractError("operand width " + std::to_string(d.width()) + " != group width " +
                        std::to_string(width_));
  }
  return sbst::execute(instructions_[i], d);
}

InstructionGroup InstructionGroup::with_width(int width) const {
  return InstructionGroup(name_, width, control_width_, instructions_, factored_);
}

namespace {

InstructionSpec make(std::string mnemonic, std::string_view code, Semantics s) {
  return InstructionSpec{std::move(mnemonic), ControlCode::parse(code), semantics_arity(s), s};
}

}  // namespace

InstructionGroup builtin_group(std::string_view name, int width) {
  // ALU groups use the MIPS R-type funct field as the opcode.
  if (name == "demo3") {
    return InstructionGroup("demo3", width, 2,
                            {make("MOV", "01", Semantics::kMov),
                             make("AND", "10", Semantics::kAnd),
                             make("XOR", "11", Semantics::kXor)},
                            "~c2 & y1 | c2 & (~c1 & y2 | c1 & y3)");
  }
  if (name == "alu-logic") {
    return InstructionGroup("alu-logic", width, 6,
                            {make("AND", "100100", Semantics::kAnd),
                             make("OR", "100101", Semantics::kOr),
                             make("XOR", "100110", Semantics::kXor),
                             make("NOR", "100111", Semantics::kNor)});
  }
  if (name == "alu-arith") {
    return InstructionGroup("alu-arith", width, 6,
                            {make("ADD", "100000", Semantics::kAdd),
                             make("ADDU", "100001", Semantics::kAdd),
                             make("SUB", "100010", Semantics::kSub),
                             make("SUBU", "100011", Semantics::kSub)});
  }
  if (name == "alu-compare-shift") {
    return InstructionGroup("alu-compare-shift", width, 6,
                            {make("SLT", "101010", Semantics::kSlt),
                             make("SLTU", "101011", Semantics::kSltu),
                             make("SLLV", "000100", Semantics::kSll),
                             make("SRLV", "000110", Semantics::kSrl),
                             make("SRAV", "000111", Semantics::kSra)});
  }
  throw ConfigError("unknown builtin group '" + std::string(name) + "'");
}

std::span<const std::string_view> builtin_group_names() noexcept { return kBuiltinNames; }

InstructionGroup group_from_json(const nlohmann::json& j) {
  static const std::set<std::string> kTopKeys = {"name", "width", "control_width",
                                                 "instructions", "factored"};
  static const std::set<std::string> kInsKeys = {"mnemonic", "code", "semantics", "arity"};
  if (!j.is_object()) throw ConfigError("group definition must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!kTopKeys.contains(key)) throw ConfigError("unknown group key '" + key + "'");
  }
  try {
    const int width = j.at("width").get<int>();
    const int control_width = j.at("control_width").get<int>();
    const auto& list = j.at("instructions");
    if (!list.is_array() || list.empty()) {
      throw ConfigError("group needs a non-empty instruction list");
    }
    std::vector<InstructionSpec> specs;
    for (const auto& item : list) {
      for (const auto& [key, _] : item.items()) {
        if (!kInsKeys.contains(key)) throw ConfigError("unknown instruction key '" + key + "'");
      }
      InstructionSpec spec;
      spec.mnemonic = item.at("mnemonic").get<std::string>();
      const auto tag = item.at("semantics").get<std::string>();
      auto sem = parse_semantics(tag);
      if (!sem) throw ConfigError(spec.mnemonic + ": unknown semantics tag '" + tag + "'");
      spec.semantics = *sem;
      spec.code = ControlCode::parse(item.at("code").get<std::string>());
      spec.arity = item.contains("arity") ? item.at("arity").get<int>() : semantics_arity(*sem);
      specs.push_back(std::move(spec));
    }
    return InstructionGroup(j.value("name", std::string("custom")), width, control_width,
                            std::move(specs), j.value("factored", std::string()));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed group definition: ") + e.what());
  }
}

nlohmann::ordered_json group_to_json(const InstructionGroup& g) {
  nlohmann::ordered_json j;
  j["name"] = g.name();
  j["width"] = g.width();
  j["control_width"] = g.control_width();
  auto& list = j["instructions"] = nlohmann::ordered_json::array();
  for (const auto& ins : g.instructions()) {
    list.push_back({{"mnemonic", ins.mnemonic},
                    {"code", ins.code.to_string()},
                    {"semantics", semantics_name(ins.semantics)},
                    {"arity", ins.arity}});
  }
  if (!g.factored_form().empty()) j["factored"] = g.factored_form();
  return j;
}

InstructionGroup load_group(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open group file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("group file " + path.string() + ": " + e.what());
  }
  return group_from_json(j);
}

std::string format_hex(std::uint32_t value, int width) {
  static constexpr char kDigits[] = "0123456789ABCDEF";
  const int digits = std::max(1, (width + 3) / 4);
  std::string s = "0x";
  for (int d = digits - 1; d >= 0; --d) s.push_back(kDigits[(value >> (4 * d)) & 0xF]);
  return s;
}

std::uint32_t parse_hex(std::string_view text, int width) {
  if (text.starts_with("0x") || text.starts_with("0X")) text.remove_prefix(2);
  std::uint32_t value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value, 16);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw ParseError("bad hex operand '" + std::string(text) + "'");
  }
  if ((value & ~width_mask(width)) != 0) {
    throw ParseError("operand " + std::string(text) + " exceeds " + std::to_string(width) +
                     " bits");
  }
  return value;
}

}  // namespace sbst
