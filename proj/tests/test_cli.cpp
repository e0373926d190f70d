#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"
#include "wspectra/parallel.hpp"

using namespace wspectra;
namespace fs = std::filesystem;

namespace {
const fs::path kRoot = fs::temp_directory_path() / "wspectra_cli_test";

std::vector<std::string> cheap_args(const std::string& sub) {
  if (sub == "harmonic-props") return {"--count", "10", "--seq-count", "50"};
  if (sub == "lorentz-forms") return {"--radial", "512", "--angular", "256"};
  if (sub == "eig-2d") return {"--L", "2,4", "--N", "64", "--modes", "4"};
  if (sub == "eig-dim") return {"--d", "5", "--L", "4,16", "--N", "64", "--modes", "4"};
  if (sub == "weighted-poincare") return {"--L", "4,8", "--N", "96", "--modes", "4"};
  if (sub == "interp-const") return {"--L", "8,16", "--N", "96", "--modes", "4"};
  if (sub == "div-bound") return {"--count", "3", "--cells", "100"};
  if (sub == "surface-geometry") return {"--surface", "clifford_torus", "--res", "32"};
  if (sub == "hessian-index") return {"--surface", "round_sphere", "--res", "64", "--k", "8"};
  if (sub == "neck-sweep") return {"--t", "1e-2,1e-3", "--rings", "6", "--res", "32"};
  return {};
}

int run_sub(const std::string& sub, const fs::path& out, std::vector<std::string> extra) {
  std::vector<std::string> args{"wspectra-cli", sub, "--out", out.string(), "--quiet"};
  args.insert(args.end(), extra.begin(), extra.end());
  return cli::run(args);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
}  // namespace

TEST_CASE("every subcommand runs and writes its table and summary") {
  fs::remove_all(kRoot);
  REQUIRE(cli::subcommands().size() == 11);
  for (const auto& sub : cli::subcommands()) {
    CAPTURE(sub);
    CHECK(run_sub(sub, kRoot / "all", cheap_args(sub)) == cli::kPass);
    CHECK(fs::exists(kRoot / "all" / (sub + ".csv")));
    const auto summary = nlohmann::json::parse(slurp(kRoot / "all" / (sub + ".summary.json")));
    CHECK(summary["subcommand"] == sub);
    CHECK(summary["pass"] == true);
  }
}

TEST_CASE("outputs are deterministic across runs and thread settings") {
  const std::vector<std::string> args{"--L", "2,4", "--N", "64", "--modes", "5"};
  REQUIRE(run_sub("eig-2d", kRoot / "a", args) == cli::kPass);
  auto serial = args;
  serial.push_back("--serial");
  REQUIRE(run_sub("eig-2d", kRoot / "b", serial) == cli::kPass);
  CHECK(slurp(kRoot / "a" / "eig-2d.csv") == slurp(kRoot / "b" / "eig-2d.csv"));
  CHECK(worker_count() == 2);  // WSPECTRA_THREADS set by the test driver
}

TEST_CASE("config files fill options that flags leave unset") {
  const fs::path cfg = kRoot / "eig.cfg";
  fs::create_directories(kRoot);
  std::ofstream(cfg) << "# cheap sweep\nL = 2,4\nN = 64\nmodes = 4\nformat = json\n";
  REQUIRE(run_sub("eig-2d", kRoot / "cfg", {"--config", cfg.string(), "--modes", "5"}) == cli::kPass);
  const auto doc = nlohmann::json::parse(slurp(kRoot / "cfg" / "eig-2d.json"));
  int max_mode = 0;
  for (const auto& row : doc) max_mode = std::max(max_mode, row["mode"].get<int>());
  CHECK(max_mode == 5);  // flag wins over the file
  CHECK(run_sub("eig-2d", kRoot / "cfg", {"--config", (kRoot / "missing.cfg").string()}) == cli::kUsage);
}

TEST_CASE("usage errors and failed checks map to distinct exit codes") {
  CHECK(run_sub("eig-2d", kRoot / "bad", {"--m", "0"}) == cli::kUsage);
  CHECK(run_sub("eig-2d", kRoot / "bad", {"--no-such-flag"}) == cli::kUsage);
  CHECK(cli::run(std::vector<std::string>{"wspectra-cli"}) == cli::kUsage);
  CHECK(cli::run(std::vector<std::string>{"wspectra-cli", "--help"}) == cli::kPass);
  CHECK(run_sub("quantization", kRoot / "inj", {"--inject-gamma", "0.3"}) == cli::kCheckFailed);
  fs::remove_all(kRoot);
}
