#include "sbst/emitter.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "sbst/error.hpp"

namespace sbst {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

std::string label_name(std::string_view mnemonic) {
  std::string out;
  for (char ch : mnemonic) {
    out += std::isalnum(static_cast<unsigned char>(ch)) ? ch : '_';
  }
  return out;
}

std::string hex32(std::uint32_t v) { return format_hex(v, 32); }

void emit_words(std::ostringstream& os, std::string_view label, const std::vector<std::string>& words,
                std::string_view comment = {}) {
  constexpr std::size_t kPerLine = 8;
  if (words.empty()) {
    os << label << ":\n";
    return;
  }
  for (std::size_t x = 0; x < words.size(); x += kPerLine) {
    std::string head = x == 0 ? std::string(label) + ":" : "";
    os << head << std::string(head.size() < 16 ? 16 - head.size() : 1, ' ') << ".word ";
    for (std::size_t y = x; y < std::min(words.size(), x + kPerLine); ++y) {
      if (y > x) os << ", ";
      os << words[y];
    }
    if (x == 0 && !comment.empty()) os << "    # " << comment;
    os << '\n';
  }
}

void op(std::ostringstream& os, std::string_view text, std::string_view comment = {}) {
  os << "                " << text;
  if (!comment.empty()) {
    os << std::string(text.size() < 28 ? 28 - text.size() : 1, ' ') << "# " << comment;
  }
  os << '\n';
}

std::string render(const TestProgram& prog, const InstructionGroup& group) {
  const int arity = group.operand_arity();
  const std::size_t stride = static_cast<std::size_t>(arity) * 4;
  std::ostringstream os;
  os << "# self-test program: group " << prog.group << ", width " << prog.width << ", "
     << prog.cases.size() << " executed patterns\n";
  os << "                .data\n";
  os << "set_kind:       .asciiz \"" << to_string(prog.kind) << "\"\n";
  os << "                .align 2\n";
  emit_words(os, "pool_count", {std::to_string(prog.pool.size())});
  emit_words(os, "pool_arity", {std::to_string(arity)});
  {
    std::vector<std::string> words;
    for (const auto& d : prog.pool) {
      for (int o = 0; o < arity; ++o) words.push_back(format_hex(d[static_cast<std::size_t>(o)], prog.width));
    }
    emit_words(os, "pool", words, "operand tuples");
  }
  if (!prog.index.empty()) {
    for (std::size_t i = 0; i < prog.index.size(); ++i) {
      std::vector<std::string> words{std::to_string(prog.index[i].size())};
      for (auto x : prog.index[i]) words.push_back(std::to_string(x));
      emit_words(os, "idx_" + label_name(prog.mnemonics[i]), words, "count, pool indices");
    }
  }
  emit_words(os, "signature", {hex32(0)});
  if (prog.full_stores) {
    os << "results:        .space " << prog.cases.size() * 4 << '\n';
  }

  os << "\n                .text\n";
  os << "                .globl main\n";
  os << "main:\n";
  op(os, "la    $s0, pool");
  op(os, "li    $s7, " + hex32(kSignatureSeed), "running signature");
  if (prog.full_stores) op(os, "la    $s6, results");

  for (std::size_t i = 0; i < group.size(); ++i) {
    const auto& ins = group[i];
    const std::string tag = label_name(ins.mnemonic);
    os << "\n# template " << ins.mnemonic << " (code " << ins.code.to_string() << ")\n";
    os << "t_" << tag << ":\n";
    // init
    if (prog.index.empty()) {
      op(os, "lw    $t1, pool_count", "data operands");
      op(os, "move  $t2, $s0");
    } else {
      op(os, "la    $t2, idx_" + tag);
      op(os, "lw    $t1, 0($t2)", "data operands");
      op(os, "addiu $t2, $t2, 4");
    }
    op(os, "li    $t0, 0");
    os << "l_" << tag << ":\n";
    op(os, "beq   $t0, $t1, e_" + tag);
    std::string base = "$t2";
    if (!prog.index.empty()) {
      op(os, "lw    $t3, 0($t2)", "pool index");
      op(os, "li    $t4, " + std::to_string(stride));
      op(os, "mul   $t3, $t3, $t4");
      op(os, "addu  $t3, $s0, $t3");
      base = "$t3";
    }
    op(os, "lw    $a0, 0(" + base + ")");
    if (arity == 2) op(os, "lw    $a1, 4(" + base + ")");
    // instruction under test
    const std::string mn = lower(ins.mnemonic);
    const std::string padded = mn + std::string(mn.size() < 6 ? 6 - mn.size() : 1, ' ');
    if (ins.arity == 1) {
      op(os, padded + "$v0, $a0", "instruction under test");
    } else {
      op(os, padded + "$v0, $a0, $a1", "instruction under test");
    }
    // observe
    op(os, "sll   $t8, $s7, 1");
    op(os, "srl   $t9, $s7, 31");
    op(os, "or    $s7, $t8, $t9");
    op(os, "xor   $s7, $s7, $v0", "fold result");
    if (prog.full_stores) {
      op(os, "sw    $v0, 0($s6)");
      op(os, "addiu $s6, $s6, 4");
    }
    op(os, "addiu $t0, $t0, 1");
    op(os, "addiu $t2, $t2, " + std::to_string(prog.index.empty() ? stride : 4));
    op(os, "b     l_" + tag);
    os << "e_" << tag << ":\n";
  }

  os << "\ndone:\n";
  op(os, "la    $t0, signature");
  op(os, "sw    $s7, 0($t0)");
  op(os, "break");
  return os.str();
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (ch == ',' || std::isspace(static_cast<unsigned char>(ch))) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::size_t parse_count(const std::string& s) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used != s.size()) throw ParseError("bad count '" + s + "'");
    return static_cast<std::size_t>(v);
  } catch (const std::logic_error&) {
    throw ParseError("bad count '" + s + "'");
  }
}

}  // namespace

nlohmann::ordered_json TestProgram::manifest() const {
  nlohmann::ordered_json j;
  j["type"] = "manifest";
  j["group"] = group;
  j["width"] = width;
  j["kind"] = to_string(kind);
  const auto counts = pattern_counts(*this);
  j["stored"] = counts.stored;
  j["executed"] = counts.executed;
  j["observation"] = full_stores ? "full" : "signature";
  auto& list = j["cases"] = nlohmann::ordered_json::array();
  for (const auto& c : cases) {
    nlohmann::ordered_json item;
    item["mnemonic"] = mnemonics[c.instruction];
    auto ops = nlohmann::ordered_json::array();
    for (int o = 0; o < c.operands.arity(); ++o) {
      ops.push_back(format_hex(c.operands[static_cast<std::size_t>(o)], width));
    }
    item["operands"] = std::move(ops);
    item["expected"] = format_hex(c.expected, width);
    list.push_back(std::move(item));
  }
  j["signature"] = hex32(signature);
  return j;
}

TestProgram emit_program(const InstructionGroup& group, const OperandSet& operands,
                         const EmitOptions& options) {
  if (options.format != "mips") {
    throw ConfigError("unsupported program format '" + options.format + "' (supported: mips)");
  }
  operands.require_group(group);

  TestProgram prog;
  prog.group = group.name();
  prog.width = group.width();
  prog.kind = operands.kind();
  prog.mnemonics = group.mnemonics();
  prog.full_stores = options.full_stores;

  std::map<OperandTuple, std::size_t> slot;
  auto intern = [&](const OperandTuple& d) {
    auto [it, inserted] = slot.try_emplace(d, prog.pool.size());
    if (inserted) prog.pool.push_back(d);
    return it->second;
  };
  std::vector<std::vector<std::size_t>> index(group.size());
  for (std::size_t i = 0; i < group.size(); ++i) {
    for (const auto& d : operands[i]) index[i].push_back(intern(d));
  }
  // Every instruction walking the whole pool in order needs no index tables.
  const bool shared = std::all_of(index.begin(), index.end(), [&](const auto& v) {
    if (v.size() != prog.pool.size()) return false;
    for (std::size_t x = 0; x < v.size(); ++x) {
      if (v[x] != x) return false;
    }
    return true;
  });
  if (!shared) prog.index = std::move(index);

  for (std::size_t i = 0; i < group.size(); ++i) {
    for (const auto& d : operands[i]) {
      const std::uint32_t y = group.eval(i, d[0], d.second());
      prog.cases.push_back({i, d, y});
      prog.signature = fold_signature(prog.signature, y);
    }
  }
  prog.assembly = render(prog, group);
  return prog;
}

PatternCounts pattern_counts(const TestProgram& program) noexcept {
  return {program.pool.size(), program.cases.size()};
}

std::uint32_t self_check_signature(const TestProgram& program) noexcept {
  std::uint32_t sig = kSignatureSeed;
  for (const auto& c : program.cases) sig = fold_signature(sig, c.expected);
  return sig;
}

std::uint32_t self_check_signature(const nlohmann::json& manifest) {
  try {
    const int width = manifest.at("width").get<int>();
    std::uint32_t sig = kSignatureSeed;
    for (const auto& c : manifest.at("cases")) {
      sig = fold_signature(sig, parse_hex(c.at("expected").get<std::string>(), width));
    }
    return sig;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed manifest: ") + e.what());
  }
}

OperandSet parse_data_section(std::string_view assembly, const InstructionGroup& group) {
  std::map<std::string, std::vector<std::string>> blocks;
  std::string kind;
  std::string current;
  bool in_data = false;
  std::istringstream in{std::string(assembly)};
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto words = split_words(line);
    if (words.empty()) continue;
    if (words[0] == ".data") {
      in_data = true;
      continue;
    }
    if (words[0] == ".text") break;
    if (!in_data) continue;
    std::size_t at = 0;
    if (words[0].back() == ':') {
      current = words[0].substr(0, words[0].size() - 1);
      blocks[current];
      at = 1;
    }
    if (at >= words.size()) continue;
    if (words[at] == ".asciiz" && current == "set_kind" && at + 1 < words.size()) {
      kind = words[at + 1];
      kind.erase(std::remove(kind.begin(), kind.end(), '"'), kind.end());
    } else if (words[at] == ".word") {
      if (current.empty()) throw ParseError("data word outside a label");
      auto& b = blocks[current];
      b.insert(b.end(), words.begin() + static_cast<std::ptrdiff_t>(at + 1), words.end());
    }
  }

  OperandSetKind set_kind;
  if (kind == "control") {
    set_kind = OperandSetKind::kControl;
  } else if (kind == "pet") {
    set_kind = OperandSetKind::kPet;
  } else if (kind == "merged") {
    set_kind = OperandSetKind::kMerged;
  } else {
    throw ParseError("data section lacks a valid set_kind");
  }
  if (!blocks.count("pool_count") || !blocks.count("pool_arity") || !blocks.count("pool")) {
    throw ParseError("data section lacks the operand pool");
  }
  const std::size_t count = parse_count(blocks["pool_count"].at(0));
  const std::size_t arity = parse_count(blocks["pool_arity"].at(0));
  if (arity != static_cast<std::size_t>(group.operand_arity())) {
    throw ParseError("pool arity does not match group '" + group.name() + "'");
  }
  const auto& words = blocks["pool"];
  if (words.size() != count * arity) throw ParseError("pool size does not match pool_count");
  std::vector<OperandTuple> pool;
  for (std::size_t t = 0; t < count; ++t) {
    const auto a = parse_hex(words[t * arity], group.width());
    pool.push_back(arity == 1 ? OperandTuple(a, group.width())
                              : OperandTuple(a, parse_hex(words[t * arity + 1], group.width()),
                                             group.width()));
  }

  std::vector<std::vector<OperandTuple>> per(group.size());
  for (std::size_t i = 0; i < group.size(); ++i) {
    const auto it = blocks.find("idx_" + label_name(group[i].mnemonic));
    if (it == blocks.end()) {
      per[i] = pool;
      continue;
    }
    const auto& idx = it->second;
    if (idx.empty() || parse_count(idx[0]) != idx.size() - 1) {
      throw ParseError("index table for " + group[i].mnemonic + " is truncated");
    }
    for (std::size_t x = 1; x < idx.size(); ++x) {
      const auto slot = parse_count(idx[x]);
      if (slot >= pool.size()) throw ParseError("pool index out of range");
      per[i].push_back(pool[slot]);
    }
  }
  return OperandSet(set_kind, group, std::move(per));
}

}  // namespace sbst
