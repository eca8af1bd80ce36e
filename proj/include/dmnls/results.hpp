#pragma once

#include <string>
#include <vector>

#include "dmnls/types.hpp"

namespace dmnls {

enum class TableFormat { csv, json };

/// Rectangular table of scalars with provenance. NaN entries are only
/// allowed in columns marked nullable (blow-up flags and the like).
struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<Real>> rows;
  std::vector<bool> nullable;  // per column; empty means none nullable
  std::string producer;        // producing subcommand
  std::string manifest_hash;

  int column_index(const std::string& name) const;  // -1 when absent
};

bool operator==(const ResultTable& a, const ResultTable& b);

/// Locale-independent shortest-faithful formatting, 17 significant digits.
std::string format_real(Real x);
Real parse_real(const std::string& text);

void validate_table(const ResultTable& table);

std::string to_csv(const ResultTable& table);
std::string to_json_text(const ResultTable& table);
ResultTable table_from_csv(const std::string& text);
ResultTable table_from_json_text(const std::string& text);

/// Bit-stable writer: identical tables produce identical bytes.
void write_results(const ResultTable& table, TableFormat format, const std::string& path);
ResultTable read_table(const std::string& path);  // dispatches on extension

}  // namespace dmnls
