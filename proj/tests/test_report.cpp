#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "wspectra/errors.hpp"
#include "wspectra/report.hpp"

using namespace wspectra;
using namespace wspectra::report;
namespace fs = std::filesystem;

namespace {
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
int count_lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

Table sample() {
  Table t;
  t.columns = {"L", "lambda", "pass", "note"};
  t.add({2.0, 0.1 + 0.2, true, std::string("a,b")});
  t.add({4.0, 1.0 / 3.0, false, std::string("plain")});
  t.add({8.0, std::numeric_limits<double>::infinity(), true, std::string("q\"uote")});
  t.plot_x = "L";
  t.plot_y = "lambda";
  return t;
}
}  // namespace

TEST_CASE("csv layout") {
  Table empty;
  empty.columns = {"a", "b"};
  CHECK(to_csv(empty) == "a,b\n");
  const auto csv = to_csv(sample());
  CHECK(count_lines(csv) == 4);
  CHECK(csv.find('\r') == std::string::npos);
  CHECK(csv.find("\"a,b\"") != std::string::npos);
  CHECK(csv.find("inf") != std::string::npos);
  Table t;
  t.columns = {"x"};
  CHECK_THROWS_AS(t.add({1.0, 2.0}), Error);
}

TEST_CASE("doubles round trip through 17 significant digits") {
  for (double v : {0.1 + 0.2, 1.0 / 3.0, 6.02214076e23, -4.9e-324, 1e-300}) {
    const std::string s = format_double(v);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == v);
  }
  CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("emitted files are byte-identical across runs and carry the plot twin") {
  const fs::path dir = fs::temp_directory_path() / "wspectra_report_test";
  fs::remove_all(dir);
  emit_report(sample(), Format::csv, (dir / "one" / "t.csv").string());
  emit_report(sample(), Format::csv, (dir / "two" / "t.csv").string());
  CHECK(slurp(dir / "one" / "t.csv") == slurp(dir / "two" / "t.csv"));
  CHECK(fs::exists(dir / "one" / "t.dat"));
  emit_report(sample(), Format::json, (dir / "t.json").string());
  const auto doc = nlohmann::json::parse(slurp(dir / "t.json"));
  CHECK(doc.size() == 3);
  CHECK(doc[1]["note"] == "plain");
  fs::remove_all(dir);
}

TEST_CASE("format parsing and unwritable paths") {
  CHECK(parse_format("json") == Format::json);
  CHECK_THROWS_AS(parse_format("xml"), Error);
  CHECK_THROWS_AS(emit_report(sample(), Format::csv, "/proc/wspectra/t.csv"), Error);
}
