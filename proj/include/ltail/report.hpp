#pragma once

// Tabular results with CSV and JSON writers.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace ltail {

/// A blank cell is std::monostate (written as an empty CSV field / JSON null).
using Cell = std::variant<std::monostate, double, std::string>;

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

struct RiskReport {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row) {
    row.resize(columns.size());
    rows.push_back(std::move(row));
  }

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == name) return i;
    }
    return columns.size();
  }
};

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

inline std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      default: out += c;
    }
  }
  return out + '"';
}

}  // namespace detail

inline void write_csv(const RiskReport& r, std::ostream& os) {
  for (std::size_t i = 0; i < r.columns.size(); ++i) {
    os << (i ? "," : "") << detail::csv_field(r.columns[i]);
  }
  os << '\n';
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      if (const auto* d = std::get_if<double>(&row[i])) {
        os << format_number(*d);
      } else if (const auto* s = std::get_if<std::string>(&row[i])) {
        os << detail::csv_field(*s);
      }
    }
    os << '\n';
  }
}

/// Array of row objects keyed by column name. Non-finite numbers become
/// strings since JSON has no literal for them.
inline void write_json(const RiskReport& r, std::ostream& os) {
  os << "[";
  for (std::size_t k = 0; k < r.rows.size(); ++k) {
    os << (k ? ",\n " : "\n ") << "{";
    const auto& row = r.rows[k];
    for (std::size_t i = 0; i < row.size(); ++i) {
      os << (i ? ", " : "") << detail::json_string(r.columns[i]) << ": ";
      if (const auto* d = std::get_if<double>(&row[i])) {
        if (std::isfinite(*d)) {
          os << format_number(*d);
        } else {
          os << detail::json_string(format_number(*d));
        }
      } else if (const auto* s = std::get_if<std::string>(&row[i])) {
        os << detail::json_string(*s);
      } else {
        os << "null";
      }
    }
    os << "}";
  }
  os << (r.rows.empty() ? "]\n" : "\n]\n");
}

}  // namespace ltail
