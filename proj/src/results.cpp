#include "dmnls/results.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace dmnls {

int ResultTable::column_index(const std::string& name) const {
  for (size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  return -1;
}

bool operator==(const ResultTable& a, const ResultTable& b) {
  if (a.columns != b.columns || a.producer != b.producer || a.manifest_hash != b.manifest_hash) return false;
  if (a.rows.size() != b.rows.size()) return false;
  std::vector<bool> na = a.nullable, nb = b.nullable;
  na.resize(a.columns.size(), false);
  nb.resize(b.columns.size(), false);
  if (na != nb) return false;
  for (size_t r = 0; r < a.rows.size(); ++r) {
    if (a.rows[r].size() != b.rows[r].size()) return false;
    for (size_t c = 0; c < a.rows[r].size(); ++c) {
      const Real x = a.rows[r][c], y = b.rows[r][c];
      if (std::isnan(x) != std::isnan(y)) return false;
      if (!std::isnan(x) && x != y) return false;
    }
  }
  return true;
}

std::string format_real(Real x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

Real parse_real(const std::string& text) {
  Real x = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  while (first < last && (*first == ' ' || *first == '\t')) ++first;
  const auto res = std::from_chars(first, last, x);
  if (res.ec != std::errc() ) throw std::invalid_argument("not a number: '" + text + "'");
  for (const char* p = res.ptr; p < last; ++p)
    if (*p != ' ' && *p != '\t') throw std::invalid_argument("trailing characters in number: '" + text + "'");
  return x;
}

void validate_table(const ResultTable& table) {
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) throw std::invalid_argument("result table is not rectangular");
    for (size_t c = 0; c < row.size(); ++c) {
      const bool nullable = c < table.nullable.size() && table.nullable[c];
      if (!nullable && !std::isfinite(row[c]))
        throw std::invalid_argument("non-finite value in non-nullable column '" + table.columns[c] + "'");
    }
  }
}

std::string to_csv(const ResultTable& table) {
  validate_table(table);
  std::string out;
  out += "# producer: " + table.producer + "\n";
  out += "# manifest: " + table.manifest_hash + "\n";
  for (size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ",";
    out += table.columns[c];
  }
  out += "\n";
  for (const auto& row : table.rows) {
    for (size_t c = 0; c < row.size(); ++c) {
      if (c) out += ",";
      out += format_real(row[c]);
    }
    out += "\n";
  }
  return out;
}

ResultTable table_from_csv(const std::string& text) {
  ResultTable table;
  std::istringstream in(text);
  std::string line;
  bool header_done = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto strip = [&](const std::string& prefix) -> std::string {
        if (line.rfind(prefix, 0) == 0) return line.substr(prefix.size());
        return {};
      };
      if (auto v = strip("# producer: "); !v.empty()) table.producer = v;
      if (auto v = strip("# manifest: "); !v.empty()) table.manifest_hash = v;
      continue;
    }
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.push_back("");
    if (!header_done) {
      table.columns = cells;
      header_done = true;
    } else {
      std::vector<Real> row;
      row.reserve(cells.size());
      for (const auto& c : cells) row.push_back(parse_real(c));
      table.rows.push_back(std::move(row));
    }
  }
  if (!header_done) throw std::invalid_argument("CSV has no header row");
  return table;
}

std::string to_json_text(const ResultTable& table) {
  validate_table(table);
  nlohmann::ordered_json j;
  j["producer"] = table.producer;
  j["manifest_hash"] = table.manifest_hash;
  j["columns"] = table.columns;
  std::vector<bool> nullable = table.nullable;
  nullable.resize(table.columns.size(), false);
  j["nullable"] = nullable;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    auto jr = nlohmann::ordered_json::array();
    for (Real x : row) {
      if (std::isnan(x))
        jr.push_back(nullptr);
      else
        jr.push_back(x);
    }
    rows.push_back(std::move(jr));
  }
  j["rows"] = std::move(rows);
  return j.dump(2) + "\n";
}

ResultTable table_from_json_text(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  ResultTable table;
  table.producer = j.value("producer", "");
  table.manifest_hash = j.value("manifest_hash", "");
  table.columns = j.at("columns").get<std::vector<std::string>>();
  if (j.contains("nullable")) table.nullable = j.at("nullable").get<std::vector<bool>>();
  for (const auto& jr : j.at("rows")) {
    std::vector<Real> row;
    for (const auto& cell : jr)
      row.push_back(cell.is_null() ? std::numeric_limits<Real>::quiet_NaN() : cell.get<Real>());
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_results(const ResultTable& table, TableFormat format, const std::string& path) {
  const std::string payload = format == TableFormat::csv ? to_csv(table) : to_json_text(table);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

ResultTable read_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") return table_from_json_text(buf.str());
  return table_from_csv(buf.str());
}

}  // namespace dmnls
