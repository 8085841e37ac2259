#pragma once

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include "locc/errors.hpp"

namespace locc {

/// One table cell; monostate is an absent value (empty CSV field, JSON null).
using Cell = std::variant<std::monostate, std::int64_t, double, std::string>;

inline Cell cell(std::optional<double> v) { return v ? Cell{*v} : Cell{}; }
inline Cell cell(std::uint64_t v) { return Cell{static_cast<std::int64_t>(v)}; }
inline Cell cell(double v) { return Cell{v}; }
inline Cell cell(std::string v) { return Cell{std::move(v)}; }

/// Shortest decimal that parses back to the same double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

inline double parse_double(std::string_view s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  }
  return v;
}

inline std::string format_cell(const Cell& c) {
  struct Visitor {
    std::string operator()(std::monostate) const { return {}; }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_double(v); }
    std::string operator()(const std::string& v) const { return v; }
  };
  return std::visit(Visitor{}, c);
}

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

/// Named columns plus typed rows. `meta` is echoed into every output file.
struct ResultTable {
  std::string schema;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  nlohmann::json meta = nlohmann::json::object();

  void add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) {
      throw std::logic_error(schema + ": row has " + std::to_string(row.size()) + " cells, expected " +
                             std::to_string(columns.size()));
    }
    rows.push_back(std::move(row));
  }

  [[nodiscard]] std::size_t column(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == name) return i;
    }
    throw std::out_of_range(schema + ": no column '" + std::string(name) + "'");
  }
};

/// CSV: a '#' line with schema and metadata, the header row, then data rows.
/// '.' decimals, no thousands separators, '\n' line ends.
inline void write_csv(const ResultTable& t, std::ostream& out) {
  nlohmann::json head = t.meta;
  head["schema"] = t.schema;
  out << "# " << head.dump() << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << detail::csv_field(t.columns[i]);
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << detail::csv_field(format_cell(row[i]));
    out << '\n';
  }
}

inline nlohmann::json to_json(const ResultTable& t) {
  nlohmann::json j = t.meta;
  j["schema"] = t.schema;
  j["columns"] = t.columns;
  j["rows"] = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& c : row) {
      if (std::holds_alternative<std::monostate>(c)) {
        r.push_back(nullptr);
      } else if (const auto* i = std::get_if<std::int64_t>(&c)) {
        r.push_back(*i);
      } else if (const auto* d = std::get_if<double>(&c)) {
        // JSON has no NaN; non-finite values travel as strings.
        if (std::isfinite(*d)) {
          r.push_back(*d);
        } else {
          r.push_back(format_double(*d));
        }
      } else {
        r.push_back(std::get<std::string>(c));
      }
    }
    j["rows"].push_back(std::move(r));
  }
  return j;
}

inline void write_json(const ResultTable& t, std::ostream& out) { out << to_json(t).dump(1) << '\n'; }

inline std::string to_csv_string(const ResultTable& t) {
  std::ostringstream ss;
  write_csv(t, ss);
  return ss.str();
}

/// Raw CSV contents as read back from disk.
struct CsvDocument {
  nlohmann::json meta;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

namespace detail {

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

}  // namespace detail

inline CsvDocument read_csv(std::istream& in) {
  CsvDocument doc;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) throw std::runtime_error("CSV lacks metadata line");
  doc.meta = nlohmann::json::parse(line.substr(2));
  if (!std::getline(in, line)) throw std::runtime_error("CSV lacks header row");
  doc.columns = detail::split_csv_line(line);
  while (std::getline(in, line)) {
    auto fields = detail::split_csv_line(line);
    if (fields.size() != doc.columns.size()) throw std::runtime_error("CSV row width mismatch");
    doc.rows.push_back(std::move(fields));
  }
  return doc;
}

inline CsvDocument read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_csv(in);
}

}  // namespace locc
