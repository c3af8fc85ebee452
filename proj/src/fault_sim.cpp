#include "sbst/fault_sim.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

#include "sbst/error.hpp"

namespace sbst {

FaultTable::FaultTable(std::size_t n, int width, Polarity polarity)
    : n_(n), m_(width), polarity_(polarity), e_(n * n, 0), c1_(n, 0) {}

std::uint32_t FaultTable::entry(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= n_) throw ContractError("fault table index out of range");
  if (i == j) throw ContractError("fault table has no diagonal entries");
  return e_[i * n_ + j];
}

void FaultTable::set_entry(std::size_t i, std::size_t j, std::uint32_t bits) {
  if (i >= n_ || j >= n_ || i == j) throw ContractError("bad fault table entry");
  e_[i * n_ + j] = bits & width_mask(m_);
}

void FaultTable::set_c1(std::size_t i, std::uint32_t bits) {
  c1_.at(i) = bits & width_mask(m_);
}

bool FaultTable::satisfied(const BitConstraint& c) const {
  const std::uint32_t bit = 1u << (c.bit - 1);
  if (c.kind == ConstraintKind::kC1) return (c1_.at(c.row) & bit) != 0;
  return (entry(c.row, c.col) & bit) != 0;
}

FaultTable simulate(const InstructionGroup& group, const OperandSet& operands,
                    Polarity polarity) {
  operands.require_group(group);
  const std::size_t n = group.size();
  const std::uint32_t mask = group.mask();
  FaultTable table(n, group.width(), polarity);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& d : operands[i]) {
      const std::uint32_t yi = group.eval(i, d[0], d.second());
      table.merge_c1(i, c1_bits(yi, mask, polarity));
      for (std::size_t h = 0; h < n; ++h) {
        if (h == i) continue;
        const std::uint32_t yh = group.eval(h, d[0], d.second());
        table.merge_entry(i, h, c2_bits(yi, yh, mask, polarity));
      }
    }
  }
  return table;
}

CoverageReport coverage(const FaultTable& table, const ConstraintUniverse& universe) {
  if (table.size() != universe.instruction_count() || table.width() != universe.width()) {
    throw ContractError("fault table and universe shapes differ");
  }
  if (table.polarity() != universe.polarity()) {
    throw ContractError("fault table and universe polarities differ");
  }
  CoverageReport report;
  report.per_row.resize(table.size());
  for (const auto& c : universe.constraints()) {
    auto& row = report.per_row[c.row];
    ++row.total;
    ++report.total;
    if (table.satisfied(c)) {
      ++row.satisfied;
      ++report.satisfied;
    } else {
      report.unsatisfied.push_back(c);
    }
  }
  report.percent =
      report.total == 0 ? 0.0 : 100.0 * static_cast<double>(report.satisfied) /
                                    static_cast<double>(report.total);
  return report;
}

std::vector<TableDiff> diff_tables(const FaultTable& a, const FaultTable& b) {
  if (a.size() != b.size() || a.width() != b.width()) {
    throw ContractError("cannot diff fault tables of different shape");
  }
  std::vector<TableDiff> out;
  auto scan = [&](ConstraintKind kind, std::size_t i, std::size_t j, std::uint32_t va,
                  std::uint32_t vb) {
    for (std::uint32_t d = va ^ vb; d != 0; d &= d - 1) {
      const int k = std::countr_zero(d) + 1;
      const std::uint32_t bit = 1u << (k - 1);
      out.push_back({kind, i, j, k, (va & bit) != 0, (vb & bit) != 0});
    }
  };
  for (std::size_t i = 0; i < a.size(); ++i) {
    scan(ConstraintKind::kC1, i, BitConstraint::kNoColumn, a.c1(i), b.c1(i));
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (i != j) scan(ConstraintKind::kC2, i, j, a.entry(i, j), b.entry(i, j));
    }
  }
  return out;
}

std::string bit_string(std::uint32_t bits, int width) {
  std::string s(static_cast<std::size_t>(width), '0');
  for (int k = 1; k <= width; ++k) {
    if ((bits >> (k - 1)) & 1u) s[static_cast<std::size_t>(width - k)] = '1';
  }
  return s;
}

nlohmann::ordered_json table_to_json(const FaultTable& table, const InstructionGroup& group) {
  nlohmann::ordered_json j;
  j["type"] = "fault_table";
  j["group"] = group.name();
  j["width"] = table.width();
  j["polarity"] = to_string(table.polarity());
  j["mnemonics"] = group.mnemonics();
  auto& rows = j["entries"] = nlohmann::ordered_json::array();
  auto& c1 = j["c1"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < table.size(); ++i) {
    auto row = nlohmann::ordered_json::array();
    for (std::size_t h = 0; h < table.size(); ++h) {
      if (h == i) {
        row.push_back(nullptr);
      } else {
        row.push_back(bit_string(table.entry(i, h), table.width()));
      }
    }
    rows.push_back(std::move(row));
    c1.push_back(bit_string(table.c1(i), table.width()));
  }
  return j;
}

std::string table_to_grid(const FaultTable& table, const InstructionGroup& group) {
  std::size_t label = 2;
  for (const auto& ins : group.instructions()) label = std::max(label, ins.mnemonic.size());
  const std::size_t cell = std::max<std::size_t>(label, static_cast<std::size_t>(table.width()));
  std::ostringstream os;
  auto pad = [&](const std::string& s, std::size_t w) {
    os << s << std::string(w > s.size() ? w - s.size() : 0, ' ');
  };
  pad("", label);
  for (const auto& ins : group.instructions()) {
    os << "  ";
    pad(ins.mnemonic, cell);
  }
  os << "  C1\n";
  for (std::size_t i = 0; i < table.size(); ++i) {
    pad(group[i].mnemonic, label);
    for (std::size_t h = 0; h < table.size(); ++h) {
      os << "  ";
      pad(h == i ? std::string("-") : bit_string(table.entry(i, h), table.width()), cell);
    }
    os << "  " << bit_string(table.c1(i), table.width()) << '\n';
  }
  return os.str();
}

nlohmann::ordered_json coverage_to_json(const CoverageReport& report,
                                        const InstructionGroup& group) {
  nlohmann::ordered_json j;
  j["type"] = "coverage";
  j["group"] = group.name();
  j["satisfied"] = report.satisfied;
  j["total"] = report.total;
  j["percent"] = report.percent;
  auto& un = j["unsatisfied"] = nlohmann::ordered_json::array();
  for (const auto& c : report.unsatisfied) un.push_back(describe(c, group));
  auto& rows = j["per_row"] = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < report.per_row.size(); ++i) {
    rows[group[i].mnemonic] = {{"satisfied", report.per_row[i].satisfied},
                               {"total", report.per_row[i].total}};
  }
  return j;
}

}  // namespace sbst
