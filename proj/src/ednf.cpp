#include "sbst/ednf.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <map>
#include <random>
#include <set>
#include <stdexcept>

#include "sbst/error.hpp"

namespace sbst {

namespace {

std::uint64_t all_instructions(std::size_t n) noexcept {
  return n >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
}

void check_codes(const std::vector<ControlCode>& codes, int width, int control_width) {
  if (codes.empty() || codes.size() > kMaxInstructions) {
    throw ConfigError("circuit needs 1.." + std::to_string(kMaxInstructions) + " instructions");
  }
  if (width < 1 || width > kMaxWidth) throw ConfigError("circuit width out of range");
  if (control_width < 1 || control_width > kMaxControlWidth) {
    throw ConfigError("control width out of range");
  }
  std::set<std::uint32_t> seen;
  for (const auto& c : codes) {
    if (c.width != control_width) throw ConfigError("control code width mismatch");
    if (!seen.insert(c.bits).second) throw ConfigError("duplicate control code");
  }
}

// Recursive-descent parser for "a & b | (c & d)" with literals c<j>, ~c<j>
// and data inputs y<i>.
class ExpressionParser {
 public:
  ExpressionParser(std::string_view text, int control_width, std::size_t n,
                   std::vector<SliceGate>& gates)
      : text_(text), p_(control_width), n_(n), gates_(gates) {}

  SliceSource parse() {
    SliceSource root = parse_or();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw ConfigError("factored form, position " + std::to_string(pos_) + ": " + why);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char ch) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == ch) {
      ++pos_;
      return true;
    }
    return false;
  }

  SliceSource make_gate(GateType type, std::vector<SliceSource> inputs) {
    if (inputs.size() == 1) return inputs.front();
    gates_.push_back(SliceGate{type, std::move(inputs)});
    return SliceSource{SliceSource::Kind::kGate, static_cast<int>(gates_.size() - 1), false};
  }

  SliceSource parse_or() {
    std::vector<SliceSource> terms{parse_and()};
    while (accept('|')) terms.push_back(parse_and());
    return make_gate(GateType::kOr, std::move(terms));
  }

  SliceSource parse_and() {
    std::vector<SliceSource> factors{parse_factor()};
    while (accept('&')) factors.push_back(parse_factor());
    return make_gate(GateType::kAnd, std::move(factors));
  }

  int parse_index() {
    skip_space();
    const std::size_t start = pos_;
    int value = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      value = value * 10 + (text_[pos_] - '0');
      ++pos_;
    }
    if (pos_ == start) fail("expected an index");
    return value;
  }

  SliceSource parse_factor() {
    if (accept('(')) {
      SliceSource inner = parse_or();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    const bool inverted = accept('~');
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char kind = text_[pos_++];
    if (kind == 'c') {
      const int j = parse_index();
      if (j < 1 || j > p_) fail("control line c" + std::to_string(j) + " out of range");
      return SliceSource{SliceSource::Kind::kLiteral, j, inverted};
    }
    if (kind == 'y') {
      if (inverted) fail("data inputs cannot be inverted");
      const int i = parse_index();
      if (i < 1 || static_cast<std::size_t>(i) > n_) {
        fail("data input y" + std::to_string(i) + " out of range");
      }
      return SliceSource{SliceSource::Kind::kData, i - 1, false};
    }
    fail("expected c<j>, y<i> or '('");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int p_;
  std::size_t n_;
  std::vector<SliceGate>& gates_;
};

}  // namespace

std::string SliceSource::to_string() const {
  switch (kind) {
    case Kind::kLiteral: return (inverted ? "~c" : "c") + std::to_string(index);
    case Kind::kData: return "y" + std::to_string(index + 1);
    case Kind::kGate: return "G" + std::to_string(index + 1);
  }
  return "?";
}

EdnfCircuit EdnfCircuit::two_level(std::vector<ControlCode> codes, int width, int control_width) {
  check_codes(codes, width, control_width);
  EdnfCircuit c;
  c.two_level_ = true;
  c.width_ = width;
  c.control_width_ = control_width;
  c.codes_ = std::move(codes);
  SliceGate out{GateType::kOr, {}};
  for (std::size_t i = 0; i < c.codes_.size(); ++i) {
    SliceGate term{GateType::kAnd, {}};
    for (int j = control_width; j >= 1; --j) {
      term.inputs.push_back({SliceSource::Kind::kLiteral, j, !c.codes_[i].line(j)});
    }
    term.inputs.push_back({SliceSource::Kind::kData, static_cast<int>(i), false});
    c.gates_.push_back(std::move(term));
    out.inputs.push_back({SliceSource::Kind::kGate, static_cast<int>(i), false});
  }
  c.gates_.push_back(std::move(out));
  return c;
}

EdnfCircuit EdnfCircuit::factored(std::vector<ControlCode> codes, int width, int control_width,
                                  std::string_view expression) {
  check_codes(codes, width, control_width);
  EdnfCircuit c;
  c.two_level_ = false;
  c.width_ = width;
  c.control_width_ = control_width;
  c.codes_ = std::move(codes);
  ExpressionParser parser(expression, control_width, c.codes_.size(), c.gates_);
  const SliceSource root = parser.parse();
  if (root.kind != SliceSource::Kind::kGate) {
    throw ConfigError("factored form must contain at least one gate");
  }

  // Under code_i the output must follow y_i.
  const std::size_t n = c.codes_.size();
  std::vector<std::uint64_t> columns;
  if (n <= 12) {
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << n); ++v) columns.push_back(v);
  } else {
    for (std::size_t h = 0; h < n; ++h) {
      columns.push_back(std::uint64_t{1} << h);
      columns.push_back(all_instructions(n) & ~(std::uint64_t{1} << h));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::uint64_t col : columns) {
      if (c.evaluate(c.codes_[i].bits, col) != (((col >> i) & 1u) != 0)) {
        throw ConfigError("factored form does not select y" + std::to_string(i + 1) +
                          " under code " + c.codes_[i].to_string());
      }
    }
  }
  return c;
}

bool EdnfCircuit::evaluate(std::uint32_t control, std::uint64_t data_column) const {
  std::vector<bool> value(gates_.size());
  for (std::size_t g = 0; g < gates_.size(); ++g) {
    const auto& gate = gates_[g];
    bool acc = gate.type == GateType::kAnd;
    for (const auto& src : gate.inputs) {
      bool v = false;
      switch (src.kind) {
        case SliceSource::Kind::kLiteral:
          v = (((control >> (src.index - 1)) & 1u) != 0) != src.inverted;
          break;
        case SliceSource::Kind::kData: v = ((data_column >> src.index) & 1u) != 0; break;
        case SliceSource::Kind::kGate: v = value[static_cast<std::size_t>(src.index)]; break;
      }
      acc = gate.type == GateType::kAnd ? (acc && v) : (acc || v);
    }
    value[g] = acc;
  }
  return value.back();
}

std::string EdnfCircuit::gate_expression(std::size_t g) const {
  const auto& gate = gates_[g];
  std::string out;
  const char* sep = gate.type == GateType::kAnd ? " & " : " | ";
  for (std::size_t x = 0; x < gate.inputs.size(); ++x) {
    if (x > 0) out += sep;
    const auto& src = gate.inputs[x];
    if (src.kind == SliceSource::Kind::kGate) {
      const auto child = static_cast<std::size_t>(src.index);
      const bool parens = gate.type == GateType::kAnd && gates_[child].type == GateType::kOr;
      out += parens ? "(" + gate_expression(child) + ")" : gate_expression(child);
    } else {
      out += src.to_string();
    }
  }
  return out;
}

std::string EdnfCircuit::expression() const { return gate_expression(output_gate()); }

EdnfCircuit build_circuit(const InstructionGroup& group) {
  return EdnfCircuit::two_level(group.codes(), group.width(), group.control_width());
}

EdnfCircuit build_factored_circuit(const InstructionGroup& group) {
  if (group.factored_form().empty()) {
    throw ConfigError("group '" + group.name() + "' has no factored form");
  }
  return EdnfCircuit::factored(group.codes(), group.width(), group.control_width(),
                               group.factored_form());
}

std::string describe(const FaultSite& site, const EdnfCircuit& circuit) {
  const std::string sa = site.value == StuckAt::kOne ? ".SA1" : ".SA0";
  switch (site.location) {
    case FaultLocation::kAndControl:
      return "AND[i=" + std::to_string(site.gate + 1) + ",k=" + std::to_string(site.bit) +
             "].ctrl[j=" + std::to_string(site.line) + "]" + sa;
    case FaultLocation::kAndData:
      return "AND[i=" + std::to_string(site.gate + 1) + ",k=" + std::to_string(site.bit) +
             "].data" + sa;
    case FaultLocation::kControlLine: return "CTRL[j=" + std::to_string(site.line) + "]" + sa;
    case FaultLocation::kGateInput: {
      const auto& gate = circuit.gates().at(static_cast<std::size_t>(site.gate));
      return std::string(gate.type == GateType::kAnd ? "AND" : "OR") +
             "[g=" + std::to_string(site.gate + 1) + ",k=" + std::to_string(site.bit) +
             "].in[" + std::to_string(site.pin) +
             "]=" + gate.inputs.at(static_cast<std::size_t>(site.pin)).to_string() + sa;
    }
  }
  return "?";
}

bool is_control_site(const FaultSite& site, const EdnfCircuit& circuit) {
  switch (site.location) {
    case FaultLocation::kAndControl:
    case FaultLocation::kControlLine: return true;
    case FaultLocation::kAndData: return false;
    case FaultLocation::kGateInput:
      return circuit.gates()
                 .at(static_cast<std::size_t>(site.gate))
                 .inputs.at(static_cast<std::size_t>(site.pin))
                 .kind == SliceSource::Kind::kLiteral;
  }
  return false;
}

std::vector<FaultSite> enumerate_faults(const EdnfCircuit& circuit) {
  std::vector<FaultSite> out;
  const auto& gates = circuit.gates();
  // The OR gate of the two-level form is not part of its fault universe.
  const std::size_t gate_count = circuit.is_two_level() ? gates.size() - 1 : gates.size();
  for (std::size_t g = 0; g < gate_count; ++g) {
    for (int k = 1; k <= circuit.width(); ++k) {
      for (std::size_t x = 0; x < gates[g].inputs.size(); ++x) {
        const auto& src = gates[g].inputs[x];
        FaultSite site;
        site.gate = static_cast<int>(g);
        site.pin = static_cast<int>(x);
        site.bit = k;
        if (circuit.is_two_level()) {
          site.location = src.kind == SliceSource::Kind::kLiteral ? FaultLocation::kAndControl
                                                                  : FaultLocation::kAndData;
        } else {
          site.location = FaultLocation::kGateInput;
        }
        site.line = src.kind == SliceSource::Kind::kLiteral ? src.index : 0;
        for (StuckAt v : {StuckAt::kZero, StuckAt::kOne}) {
          site.value = v;
          out.push_back(site);
        }
      }
    }
  }
  for (int j = 1; j <= circuit.control_width(); ++j) {
    for (StuckAt v : {StuckAt::kZero, StuckAt::kOne}) {
      out.push_back(FaultSite{FaultLocation::kControlLine, -1, -1, 0, j, v});
    }
  }
  return out;
}

std::string describe(const BridgeFault& bridge) {
  return "BRIDGE[c" + std::to_string(bridge.line_a) + ",c" + std::to_string(bridge.line_b) +
         "]." + (bridge.model == BridgeModel::kWiredAnd ? "wired_AND" : "wired_OR");
}

std::vector<BridgeFault> all_bridges(const EdnfCircuit& circuit) {
  std::vector<BridgeFault> out;
  for (int a = 1; a <= circuit.control_width(); ++a) {
    for (int b = a + 1; b <= circuit.control_width(); ++b) {
      out.push_back({a, b, BridgeModel::kWiredAnd});
      out.push_back({a, b, BridgeModel::kWiredOr});
    }
  }
  return out;
}

std::vector<std::vector<FaultSite>> sample_multiple_faults(const EdnfCircuit& circuit,
                                                           int cardinality, std::size_t count,
                                                           std::uint64_t seed) {
  if (cardinality < 1) throw ContractError("fault set cardinality must be >= 1");
  if (count < 1) throw ContractError("sample count must be >= 1");
  std::vector<FaultSite> locations;
  for (const auto& s : enumerate_faults(circuit)) {
    if (s.value == StuckAt::kZero && is_control_site(s, circuit)) locations.push_back(s);
  }
  const std::size_t loc = locations.size();
  const auto card = static_cast<std::size_t>(cardinality);
  if (card > loc) return {};

  // Number of possible sets: C(loc, card) * 2^card, saturated.
  constexpr double kEnumerateLimit = 2e6;
  double total = 1;
  for (std::size_t x = 0; x < card; ++x) {
    total = total * static_cast<double>(loc - x) / static_cast<double>(x + 1);
  }
  total *= static_cast<double>(std::uint64_t{1} << card);

  std::mt19937_64 rng(seed);
  auto make_set = [&](const std::vector<std::size_t>& idx, std::uint64_t values) {
    std::vector<FaultSite> set;
    for (std::size_t x = 0; x < idx.size(); ++x) {
      FaultSite s = locations[idx[x]];
      s.value = ((values >> x) & 1u) != 0 ? StuckAt::kOne : StuckAt::kZero;
      set.push_back(s);
    }
    std::sort(set.begin(), set.end());
    return set;
  };

  if (total <= kEnumerateLimit && static_cast<double>(count) * 4 >= total) {
    std::vector<std::vector<FaultSite>> all;
    std::vector<std::size_t> idx(card);
    for (std::size_t x = 0; x < card; ++x) idx[x] = x;
    while (true) {
      for (std::uint64_t v = 0; v < (std::uint64_t{1} << card); ++v) all.push_back(make_set(idx, v));
      // next combination
      std::size_t x = card;
      while (x > 0 && idx[x - 1] == loc - card + (x - 1)) --x;
      if (x == 0) break;
      ++idx[x - 1];
      for (std::size_t y = x; y < card; ++y) idx[y] = idx[y - 1] + 1;
    }
    if (count >= all.size()) return all;
    for (std::size_t x = all.size() - 1; x > 0; --x) {
      std::swap(all[x], all[static_cast<std::size_t>(rng() % (x + 1))]);
    }
    all.resize(count);
    return all;
  }

  std::set<std::vector<FaultSite>> seen;
  std::vector<std::vector<FaultSite>> out;
  while (out.size() < count) {
    std::vector<std::size_t> idx;
    while (idx.size() < card) {
      const auto pick = static_cast<std::size_t>(rng() % loc);
      if (std::find(idx.begin(), idx.end(), pick) == idx.end()) idx.push_back(pick);
    }
    auto set = make_set(idx, rng());
    if (seen.insert(set).second) out.push_back(std::move(set));
  }
  return out;
}

GateTestSet::GateTestSet(std::size_t instructions, int width) : n_(instructions), width_(width) {
  if (instructions < 1 || instructions > kMaxInstructions) {
    throw ContractError("test set instruction count out of range");
  }
  if (width < 1 || width > kMaxWidth) throw ContractError("test set width out of range");
}

void GateTestSet::add(std::uint64_t instruction_mask, std::span<const std::uint32_t> y) {
  if (y.size() != n_) throw ContractError("stimulus needs one data word per instruction");
  if (instruction_mask == 0 || (instruction_mask & ~all_instructions(n_)) != 0) {
    throw ContractError("stimulus instruction mask out of range");
  }
  for (std::uint32_t v : y) {
    if ((v & ~width_mask(width_)) != 0) throw ContractError("stimulus data exceeds width");
  }
  masks_.push_back(instruction_mask);
  y_.insert(y_.end(), y.begin(), y.end());
}

std::size_t GateTestSet::stimulus_count() const noexcept {
  std::size_t total = 0;
  for (auto m : masks_) total += static_cast<std::size_t>(std::popcount(m));
  return total;
}

GateTestSet GateTestSet::from_operands(const InstructionGroup& group,
                                       const OperandSet& operands) {
  operands.require_group(group);
  const std::size_t n = group.size();
  GateTestSet test(n, group.width());
  std::vector<std::uint32_t> y(n);
  auto outputs = [&](const OperandTuple& d) {
    for (std::size_t h = 0; h < n; ++h) y[h] = group.eval(h, d[0], d.second());
  };
  if (operands.kind() == OperandSetKind::kMerged) {
    for (const auto& d : operands[0]) {
      outputs(d);
      test.add(all_instructions(n), y);
    }
    return test;
  }
  std::map<OperandTuple, std::uint64_t> users;
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& d : operands[i]) users[d] |= std::uint64_t{1} << i;
  }
  for (const auto& [d, mask] : users) {
    outputs(d);
    test.add(mask, y);
  }
  return test;
}

GateTestSet GateTestSet::from_json(const nlohmann::json& j, const InstructionGroup& group) {
  try {
    const int width = j.at("width").get<int>();
    GateTestSet test(group.size(), width);
    for (const auto& item : j.at("stimuli")) {
      std::optional<std::size_t> index;
      if (item.contains("mnemonic")) {
        index = group.find(item.at("mnemonic").get<std::string>());
      } else {
        const auto code = ControlCode::parse(item.at("code").get<std::string>());
        for (std::size_t i = 0; i < group.size(); ++i) {
          if (group[i].code == code) index = i;
        }
      }
      if (!index) throw ParseError("stimulus selects no instruction of the group");
      const auto& words = item.at("y");
      if (words.size() != group.size()) {
        throw ParseError("stimulus needs " + std::to_string(group.size()) + " data words");
      }
      std::vector<std::uint32_t> y;
      for (const auto& w : words) y.push_back(parse_hex(w.get<std::string>(), width));
      test.add_for(*index, y);
    }
    return test;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed stimuli file: ") + e.what());
  } catch (const ConfigError& e) {
    throw ParseError(e.what());
  }
}

// Per-slice evaluation state for one injected fault (or fault set).
struct FaultGrader::Injection {
  std::array<std::int8_t, kMaxControlWidth> line;
  std::optional<BridgeFault> bridge;
  struct Pin {
    int gate;
    int pin;
    int bit;
    bool one;
  };
  std::vector<Pin> pins;

  Injection() { line.fill(-1); }
  bool global() const noexcept {
    return bridge.has_value() ||
           std::any_of(line.begin(), line.end(), [](std::int8_t v) { return v >= 0; });
  }
};

namespace {

struct PinForce {
  std::size_t gate;
  std::size_t pin;
  std::uint64_t value;
};

std::uint64_t eval_word(const EdnfCircuit& circuit, std::span<const std::uint64_t> ctrl_in,
                        std::span<const std::uint64_t> data, std::size_t words, std::size_t w,
                        std::span<const std::int8_t> line_force,
                        const std::optional<BridgeFault>& bridge,
                        std::span<const PinForce> pins, std::vector<std::uint64_t>& value) {
  const int p = circuit.control_width();
  std::array<std::uint64_t, kMaxControlWidth> c{};
  for (int j = 0; j < p; ++j) c[static_cast<std::size_t>(j)] = ctrl_in[static_cast<std::size_t>(j) * words + w];
  if (bridge) {
    auto& a = c[static_cast<std::size_t>(bridge->line_a - 1)];
    auto& b = c[static_cast<std::size_t>(bridge->line_b - 1)];
    const std::uint64_t v = bridge->model == BridgeModel::kWiredAnd ? (a & b) : (a | b);
    a = v;
    b = v;
  }
  for (int j = 0; j < p; ++j) {
    const auto f = line_force[static_cast<std::size_t>(j)];
    if (f >= 0) c[static_cast<std::size_t>(j)] = f != 0 ? ~std::uint64_t{0} : 0;
  }
  const auto& gates = circuit.gates();
  for (std::size_t g = 0; g < gates.size(); ++g) {
    const auto& gate = gates[g];
    const bool is_and = gate.type == GateType::kAnd;
    std::uint64_t acc = is_and ? ~std::uint64_t{0} : 0;
    for (std::size_t x = 0; x < gate.inputs.size(); ++x) {
      const auto& src = gate.inputs[x];
      std::uint64_t v = 0;
      switch (src.kind) {
        case SliceSource::Kind::kLiteral:
          v = c[static_cast<std::size_t>(src.index - 1)];
          if (src.inverted) v = ~v;
          break;
        case SliceSource::Kind::kData:
          v = data[static_cast<std::size_t>(src.index) * words + w];
          break;
        case SliceSource::Kind::kGate: v = value[static_cast<std::size_t>(src.index)]; break;
      }
      for (const auto& f : pins) {
        if (f.gate == g && f.pin == x) v = f.value;
      }
      acc = is_and ? (acc & v) : (acc | v);
    }
    value[g] = acc;
  }
  return value.back();
}

}  // namespace

FaultGrader::FaultGrader(const EdnfCircuit& circuit, const GateTestSet& test)
    : circuit_(&circuit) {
  const std::size_t n = circuit.instruction_count();
  const int m = circuit.width();
  const int p = circuit.control_width();
  if (test.instruction_count() != n || test.width() != m) {
    throw ContractError("test set shape does not match the circuit");
  }
  std::vector<std::uint64_t> value(circuit.gates().size());
  const std::array<std::int8_t, kMaxControlWidth> no_lines = [] {
    std::array<std::int8_t, kMaxControlWidth> a{};
    a.fill(-1);
    return a;
  }();

  slices_.resize(static_cast<std::size_t>(m));
  for (int k = 1; k <= m; ++k) {
    // Distinct (instruction, data column) pairs at bit k, in sorted order.
    std::vector<std::pair<std::uint32_t, std::uint64_t>> patterns;
    const bool bitmap = n <= 16;
    std::vector<std::uint64_t> seen;
    if (bitmap) seen.assign(((n << n) + 63) / 64, 0);
    for (std::size_t e = 0; e < test.entry_count(); ++e) {
      const auto y = test.y(e);
      std::uint64_t col = 0;
      for (std::size_t h = 0; h < n; ++h) col |= std::uint64_t{(y[h] >> (k - 1)) & 1u} << h;
      for (std::uint64_t mask = test.mask(e); mask != 0; mask &= mask - 1) {
        const auto i = static_cast<std::uint32_t>(std::countr_zero(mask));
        if (bitmap) {
          const std::uint64_t key = (std::uint64_t{i} << n) | col;
          seen[key / 64] |= std::uint64_t{1} << (key % 64);
        } else {
          patterns.emplace_back(i, col);
        }
      }
    }
    if (bitmap) {
      for (std::size_t wi = 0; wi < seen.size(); ++wi) {
        for (std::uint64_t bits = seen[wi]; bits != 0; bits &= bits - 1) {
          const std::uint64_t key = wi * 64 + static_cast<std::uint64_t>(std::countr_zero(bits));
          patterns.emplace_back(static_cast<std::uint32_t>(key >> n), key & all_instructions(n));
        }
      }
    } else {
      std::sort(patterns.begin(), patterns.end());
      patterns.erase(std::unique(patterns.begin(), patterns.end()), patterns.end());
    }

    Slice& s = slices_[static_cast<std::size_t>(k - 1)];
    s.words = (patterns.size() + 63) / 64;
    const std::size_t tail = patterns.size() % 64;
    s.last_mask = tail == 0 ? ~std::uint64_t{0} : ((std::uint64_t{1} << tail) - 1);
    s.ctrl.assign(static_cast<std::size_t>(p) * s.words, 0);
    s.data.assign(n * s.words, 0);
    s.good.assign(s.words, 0);
    std::vector<std::uint64_t> expected(s.words, 0);
    for (std::size_t t = 0; t < patterns.size(); ++t) {
      const auto [i, col] = patterns[t];
      const std::size_t w = t / 64;
      const std::uint64_t bit = std::uint64_t{1} << (t % 64);
      for (int j = 1; j <= p; ++j) {
        if (circuit.codes()[i].line(j)) s.ctrl[static_cast<std::size_t>(j - 1) * s.words + w] |= bit;
      }
      for (std::size_t h = 0; h < n; ++h) {
        if ((col >> h) & 1u) s.data[h * s.words + w] |= bit;
      }
      if ((col >> i) & 1u) expected[w] |= bit;
    }
    for (std::size_t w = 0; w < s.words; ++w) {
      s.good[w] = eval_word(circuit, s.ctrl, s.data, s.words, w, no_lines, std::nullopt, {}, value);
      const std::uint64_t valid = w + 1 == s.words ? s.last_mask : ~std::uint64_t{0};
      if (((s.good[w] ^ expected[w]) & valid) != 0) {
        throw std::logic_error("fault-free circuit does not reproduce the selected result");
      }
    }
  }
}

std::size_t FaultGrader::pattern_count(int bit) const {
  const Slice& s = slices_.at(static_cast<std::size_t>(bit - 1));
  if (s.words == 0) return 0;
  return (s.words - 1) * 64 + static_cast<std::size_t>(std::popcount(s.last_mask));
}

bool FaultGrader::differs(const Slice& s, const Injection& inj) const {
  // Pin forces are resolved by the caller for this slice.
  std::vector<std::uint64_t> value(circuit_->gates().size());
  std::vector<PinForce> pins;
  pins.reserve(inj.pins.size());
  for (const auto& pf : inj.pins) {
    pins.push_back({static_cast<std::size_t>(pf.gate), static_cast<std::size_t>(pf.pin),
                    pf.one ? ~std::uint64_t{0} : 0});
  }
  for (std::size_t w = 0; w < s.words; ++w) {
    const std::uint64_t out =
        eval_word(*circuit_, s.ctrl, s.data, s.words, w, inj.line, inj.bridge, pins, value);
    const std::uint64_t valid = w + 1 == s.words ? s.last_mask : ~std::uint64_t{0};
    if (((out ^ s.good[w]) & valid) != 0) return true;
  }
  return false;
}

bool FaultGrader::run(const Injection& inj) const {
  const bool global = inj.global();
  for (int k = 1; k <= circuit_->width(); ++k) {
    Injection local;
    local.line = inj.line;
    local.bridge = inj.bridge;
    for (const auto& pf : inj.pins) {
      if (pf.bit == k) local.pins.push_back(pf);
    }
    if (!global && local.pins.empty()) continue;
    if (differs(slices_[static_cast<std::size_t>(k - 1)], local)) return true;
  }
  return false;
}

void FaultGrader::check_site(const FaultSite& site) const {
  const auto& gates = circuit_->gates();
  if (site.location == FaultLocation::kControlLine) {
    if (site.line < 1 || site.line > circuit_->control_width()) {
      throw ContractError("fault site out of bounds: control line " + std::to_string(site.line));
    }
    return;
  }
  if (site.gate < 0 || static_cast<std::size_t>(site.gate) >= gates.size() || site.pin < 0 ||
      static_cast<std::size_t>(site.pin) >= gates[static_cast<std::size_t>(site.gate)].inputs.size() ||
      site.bit < 1 || site.bit > circuit_->width()) {
    throw ContractError("fault site out of bounds");
  }
}

bool FaultGrader::detects(const FaultSite& site) const {
  return detects(std::span<const FaultSite>(&site, 1));
}

bool FaultGrader::detects(std::span<const FaultSite> sites) const {
  Injection inj;
  for (const auto& s : sites) {
    check_site(s);
    if (s.location == FaultLocation::kControlLine) {
      inj.line[static_cast<std::size_t>(s.line - 1)] = s.value == StuckAt::kOne ? 1 : 0;
    } else {
      inj.pins.push_back({s.gate, s.pin, s.bit, s.value == StuckAt::kOne});
    }
  }
  return run(inj);
}

bool FaultGrader::detects(const BridgeFault& bridge) const {
  const int p = circuit_->control_width();
  if (bridge.line_a < 1 || bridge.line_a > p || bridge.line_b < 1 || bridge.line_b > p ||
      bridge.line_a == bridge.line_b) {
    throw ContractError("bridge fault needs two distinct control lines");
  }
  Injection inj;
  inj.bridge = bridge;
  return run(inj);
}

GradeReport grade(const EdnfCircuit& circuit, std::span<const FaultSite> faults,
                  const GateTestSet& test) {
  const FaultGrader grader(circuit, test);
  return grade(grader, circuit, faults);
}

GradeReport grade(const FaultGrader& grader, const EdnfCircuit& circuit,
                  std::span<const FaultSite> faults) {
  GradeReport r;
  r.mode = "single";
  r.total = faults.size();
  for (std::size_t x = 0; x < faults.size(); ++x) {
    if (grader.detects(faults[x])) {
      ++r.detected;
    } else {
      r.undetected.push_back(x);
      r.undetected_names.push_back(describe(faults[x], circuit));
    }
  }
  return r;
}

std::string describe(std::span<const FaultSite> sites, const EdnfCircuit& circuit) {
  std::string out;
  for (const auto& s : sites) {
    if (!out.empty()) out += " + ";
    out += describe(s, circuit);
  }
  return out;
}

GradeReport grade_multiple(const FaultGrader& grader, const EdnfCircuit& circuit,
                           std::span<const std::vector<FaultSite>> sets) {
  GradeReport r;
  r.mode = "multiple";
  r.total = sets.size();
  for (std::size_t x = 0; x < sets.size(); ++x) {
    if (grader.detects(std::span<const FaultSite>(sets[x]))) {
      ++r.detected;
    } else {
      r.undetected.push_back(x);
      r.undetected_names.push_back(describe(std::span<const FaultSite>(sets[x]), circuit));
    }
  }
  return r;
}

GradeReport grade_bridges(const FaultGrader& grader, std::span<const BridgeFault> bridges) {
  GradeReport r;
  r.mode = "bridge";
  r.total = bridges.size();
  for (std::size_t x = 0; x < bridges.size(); ++x) {
    if (grader.detects(bridges[x])) {
      ++r.detected;
    } else {
      r.undetected.push_back(x);
      r.undetected_names.push_back(describe(bridges[x]));
    }
  }
  return r;
}

nlohmann::ordered_json grade_to_json(const GradeReport& report) {
  nlohmann::ordered_json j;
  j["type"] = "grade";
  j["mode"] = report.mode;
  j["total"] = report.total;
  j["detected"] = report.detected;
  j["undetected"] = report.undetected_names;
  return j;
}

}  // namespace sbst
