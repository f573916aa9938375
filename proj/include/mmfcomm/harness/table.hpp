#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "mmfcomm/error.hpp"

namespace mmfcomm::harness {

inline constexpr const char* kArtifactVersion = "1.0.0";

struct Column {
  std::string name;
  bool integer = false;
};

class ResultTable {
 public:
  ResultTable() = default;
  explicit ResultTable(std::vector<Column> columns) : columns_(std::move(columns)) {}

  void add_row(std::vector<double> row) {
    if (row.size() != columns_.size()) throw InvalidParameter("result row width does not match columns");
    rows_.push_back(std::move(row));
  }

  const std::vector<Column>& columns() const { return columns_; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }
  nlohmann::json& metadata() { return metadata_; }
  const nlohmann::json& metadata() const { return metadata_; }

  std::size_t column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      if (columns_[i].name == name) return i;
    }
    throw InvalidParameter("no column named " + name);
  }

  double at(std::size_t row, const std::string& name) const { return rows_.at(row).at(column_index(name)); }

  std::vector<double> column(const std::string& name) const {
    const auto c = column_index(name);
    std::vector<double> out;
    out.reserve(rows_.size());
    for (const auto& r : rows_) out.push_back(r[c]);
    return out;
  }

  void write_csv(std::ostream& out) const {
    for (std::size_t c = 0; c < columns_.size(); ++c) out << (c ? "," : "") << columns_[c].name;
    out << '\n';
    for (const auto& row : rows_) {
      for (std::size_t c = 0; c < columns_.size(); ++c) {
        if (c) out << ',';
        out << format_cell(row[c], columns_[c].integer);
      }
      out << '\n';
    }
  }

  nlohmann::json to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : rows_) {
      nlohmann::json obj = nlohmann::json::object();
      for (std::size_t c = 0; c < columns_.size(); ++c) {
        if (columns_[c].integer) {
          obj[columns_[c].name] = static_cast<long long>(row[c]);
        } else {
          obj[columns_[c].name] = row[c];
        }
      }
      rows.push_back(std::move(obj));
    }
    return {{"metadata", metadata_}, {"rows", std::move(rows)}};
  }

  void write_json(std::ostream& out) const { out << to_json().dump(2) << '\n'; }

 private:
  static std::string format_cell(double v, bool integer) {
    char buf[64];
    if (integer) {
      std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
    } else {
      std::snprintf(buf, sizeof buf, "%.17g", v);
    }
    return buf;
  }

  std::vector<Column> columns_;
  std::vector<std::vector<double>> rows_;
  nlohmann::json metadata_ = nlohmann::json::object();
};

}  // namespace mmfcomm::harness
