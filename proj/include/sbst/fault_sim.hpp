#pragma once

// High-level control fault simulation: the fault table E = ||e_ij|| of
// m-bit satisfaction vectors and the coverage it implies.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sbst/constraints.hpp"
#include "sbst/isa.hpp"
#include "sbst/operands.hpp"

namespace sbst {

class FaultTable {
 public:
  FaultTable(std::size_t n, int width, Polarity polarity = Polarity::kStandard);

  std::size_t size() const noexcept { return n_; }
  int width() const noexcept { return m_; }
  Polarity polarity() const noexcept { return polarity_; }

  /// e_ij as an m-bit vector (bit k-1 set iff C2(i, j, k) witnessed).
  /// Throws ContractError on the diagonal.
  std::uint32_t entry(std::size_t i, std::size_t j) const;
  /// C1 satisfaction vector of row i.
  std::uint32_t c1(std::size_t i) const { return c1_.at(i); }

  void set_entry(std::size_t i, std::size_t j, std::uint32_t bits);
  void set_c1(std::size_t i, std::uint32_t bits);
  void merge_entry(std::size_t i, std::size_t j, std::uint32_t bits) {
    e_[i * n_ + j] |= bits;
  }
  void merge_c1(std::size_t i, std::uint32_t bits) { c1_[i] |= bits; }

  bool satisfied(const BitConstraint& c) const;

  bool operator==(const FaultTable&) const = default;

 private:
  std::size_t n_;
  int m_;
  Polarity polarity_;
  std::vector<std::uint32_t> e_;  // row-major, diagonal unused
  std::vector<std::uint32_t> c1_;
};

/// Triple loop over rows, the row's operand tuples, and columns.
FaultTable simulate(const InstructionGroup& group, const OperandSet& operands,
                    Polarity polarity = Polarity::kStandard);

struct RowCoverage {
  std::size_t satisfied = 0;
  std::size_t total = 0;
};

struct CoverageReport {
  std::size_t satisfied = 0;
  std::size_t total = 0;
  double percent = 0.0;
  std::vector<BitConstraint> unsatisfied;
  std::vector<RowCoverage> per_row;
};

CoverageReport coverage(const FaultTable& table, const ConstraintUniverse& universe);

struct TableDiff {
  ConstraintKind kind;
  std::size_t row;
  std::size_t col;  ///< BitConstraint::kNoColumn for C1 vectors
  int bit;
  bool a;
  bool b;

  bool operator==(const TableDiff&) const = default;
};

/// Every (i, j, k) where the tables disagree, C1 vectors included.
std::vector<TableDiff> diff_tables(const FaultTable& a, const FaultTable& b);

/// MSB-first binary string of an m-bit vector.
std::string bit_string(std::uint32_t bits, int width);

nlohmann::ordered_json table_to_json(const FaultTable& table, const InstructionGroup& group);
/// Mnemonic-labelled grid, one row per instruction, "-" on the diagonal.
std::string table_to_grid(const FaultTable& table, const InstructionGroup& group);
nlohmann::ordered_json coverage_to_json(const CoverageReport& report,
                                        const InstructionGroup& group);

}  // namespace sbst
