// CSV / JSON / gnuplot writers.

#include "wspectra/report.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "wspectra/errors.hpp"

namespace wspectra::report {

namespace {
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  if (const auto* b = std::get_if<bool>(&c)) return *b ? "true" : "false";
  return csv_field(std::get<std::string>(c));
}

double cell_number(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* i = std::get_if<long long>(&c)) return static_cast<double>(*i);
  throw Error(ErrorCode::ShapeMismatch, "plot column is not numeric");
}

std::ofstream open(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}
}  // namespace

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size())
    throw Error(ErrorCode::ShapeMismatch, "row has " + std::to_string(row.size()) + " cells, table has " +
                                              std::to_string(columns.size()) + " columns");
  rows.push_back(std::move(row));
}

int Table::column(const std::string& name) const {
  for (std::size_t k = 0; k < columns.size(); ++k)
    if (columns[k] == name) return static_cast<int>(k);
  return -1;
}

Format parse_format(const std::string& text) {
  if (text == "csv") return Format::csv;
  if (text == "json") return Format::json;
  throw Error(ErrorCode::Usage, "format must be csv or json");
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t k = 0; k < t.columns.size(); ++k) out += (k ? "," : "") + csv_field(t.columns[k]);
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) out += (k ? "," : "") + cell_text(row[k]);
    out += '\n';
  }
  return out;
}

nlohmann::ordered_json to_json(const Table& t) {
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t k = 0; k < row.size(); ++k)
      std::visit([&](const auto& v) { obj[t.columns[k]] = v; }, row[k]);
    rows.push_back(std::move(obj));
  }
  return rows;
}

void write_json(const nlohmann::ordered_json& doc, const std::string& path) {
  auto out = open(path);
  out << doc.dump(2) << '\n';
  finish(out, path);
}

void write_plot_data(const std::vector<double>& x, const std::vector<double>& y, const std::string& path,
                     const std::string& header) {
  if (x.size() != y.size()) throw Error(ErrorCode::ShapeMismatch, "plot series differ in length");
  auto out = open(path);
  if (!header.empty()) out << "# " << header << '\n';
  for (std::size_t k = 0; k < x.size(); ++k) out << format_double(x[k]) << ' ' << format_double(y[k]) << '\n';
  finish(out, path);
}

void emit_report(const Table& t, Format format, const std::string& path) {
  {
    auto out = open(path);
    if (format == Format::csv)
      out << to_csv(t);
    else
      out << to_json(t).dump(2) << '\n';
    finish(out, path);
  }
  if (!t.plot_x || !t.plot_y || t.rows.empty()) return;
  const int cx = t.column(*t.plot_x), cy = t.column(*t.plot_y);
  if (cx < 0 || cy < 0) throw Error(ErrorCode::ShapeMismatch, "plot column not in table");
  std::vector<double> x, y;
  for (const auto& row : t.rows) {
    x.push_back(cell_number(row[cx]));
    y.push_back(cell_number(row[cy]));
  }
  write_plot_data(x, y, std::filesystem::path(path).replace_extension(".dat").string(), *t.plot_x + " " + *t.plot_y);
}

}  // namespace wspectra::report
