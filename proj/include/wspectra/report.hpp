#pragma once
// Bit-stable tabular output: CSV with 17 significant digits and LF endings,
// pretty JSON, and two-column gnuplot twins.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace wspectra::report {

using Cell = std::variant<double, long long, bool, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  // Columns plotted against each other in the gnuplot twin (both numeric).
  std::optional<std::string> plot_x, plot_y;

  void add(std::vector<Cell> row);  // throws ShapeMismatch on a width mismatch
  int column(const std::string& name) const;
};

enum class Format { csv, json };
Format parse_format(const std::string& text);

// "%.17g" without locale influence; nan / inf spelled out.
std::string format_double(double v);

std::string to_csv(const Table& t);
nlohmann::ordered_json to_json(const Table& t);

// Writes path (CSV or JSON).  When the table names plot columns, the twin
// <path without extension>.dat is written next to it.  Throws IoError.
void emit_report(const Table& t, Format format, const std::string& path);
void write_json(const nlohmann::ordered_json& doc, const std::string& path);
void write_plot_data(const std::vector<double>& x, const std::vector<double>& y, const std::string& path,
                     const std::string& header = "");

}  // namespace wspectra::report
