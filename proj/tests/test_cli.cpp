#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "isk/cli.hpp"
#include "isk/errors.hpp"

using namespace isk;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("isk_test_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

cli::ExperimentConfig parse(const std::string& text, const std::string& sub) {
  std::istringstream in(text);
  return cli::parse_config_file(in, sub);
}

}  // namespace

TEST_CASE("config parsing: sections, overrides, diagnostics") {
  const std::string text =
      "kappa = 0.1\n"
      "# a comment\n"
      "[pressure]\n"
      "h = 0.5\n"
      "samples = 10\n"
      "[dobrushin]\n"
      "kappa = 0.2\n";
  const auto p = parse(text, "pressure");
  CHECK(p.get_double("kappa", 0) == doctest::Approx(0.1));
  CHECK(p.get_double("h", 0) == doctest::Approx(0.5));
  const auto d = parse(text, "dobrushin");
  CHECK(d.get_double("kappa", 0) == doctest::Approx(0.2));  // section overrides global
  CHECK(!d.has("h"));

  CHECK_THROWS_AS(parse("key_without_value\n", "pressure"), ValidationError);
  CHECK_THROWS_AS(parse("[pressure\nh = 1\n", "pressure"), ValidationError);
  CHECK_THROWS_AS(parse("h = 1\n", "not-a-subcommand"), ValidationError);
  // bad values surface the failing field
  const auto bad = parse("h = abc\n", "pressure");
  CHECK_THROWS_WITH_AS(bad.get_double("h", 0),
                       doctest::Contains("config field 'h'"), ValidationError);
}

TEST_CASE("config hash is stable across field reordering") {
  const auto a = parse("kappa = 0.1\nbeta = 0.3\nh = 0.4\n", "pressure");
  const auto b = parse("h = 0.4\nkappa = 0.1\nbeta = 0.3\n", "pressure");
  CHECK(cli::config_hash(a) == cli::config_hash(b));
  const auto c = parse("h = 0.5\nkappa = 0.1\nbeta = 0.3\n", "pressure");
  CHECK(cli::config_hash(a) != cli::config_hash(c));
  // canonical form is sorted
  const auto canon = cli::canonicalize(a);
  CHECK(canon.find("beta") < canon.find("h"));
  CHECK(canon.find("h") < canon.find("kappa"));
}

TEST_CASE("pressure run: free spins give log 2cosh(0.5) and reruns are byte-identical") {
  const auto dir1 = fresh_dir("pressure1");
  const auto dir2 = fresh_dir("pressure2");
  const std::string base =
      "L = 8\nkernel = nn\nh = 0.5\nsamples = 5\nseed = 42\nengine = exact\n";
  auto cfg = parse(base + "out = " + dir1.string() + "\n", "pressure");
  const auto run1 = cli::run(cfg);
  CHECK(run1.exit_code == 0);

  std::ifstream sj(dir1 / "summary.json");
  std::stringstream ss;
  ss << sj.rdbuf();
  const std::string summary = ss.str();
  CHECK(summary.find("pressure_mean") != std::string::npos);

  // extract the value numerically
  double mean = 0.0;
  {
    const auto pos = summary.find("pressure_mean");
    const auto vpos = summary.find("value", pos);
    const auto colon = summary.find(':', vpos);
    mean = std::stod(summary.substr(colon + 1));
  }
  CHECK(std::abs(mean - std::log(2.0 * std::cosh(0.5))) <= 1e-12);

  auto cfg2 = parse(base + "out = " + dir2.string() + "\n", "pressure");
  cli::run(cfg2);
  CHECK(slurp(dir1 / "detail.csv") == slurp(dir2 / "detail.csv"));
}

TEST_CASE("worker count changes nothing but wall time") {
  const auto dir1 = fresh_dir("workers1");
  const auto dir4 = fresh_dir("workers4");
  const std::string base =
      "L = 8\nkernel = nn\nkappa = 0.05\nbeta = 0.3\nh = 0.4\nsamples = 12\nseed = 7\n";
  auto c1 = parse(base + "workers = 1\nout = " + dir1.string() + "\n", "pressure");
  auto c4 = parse(base + "workers = 4\nout = " + dir4.string() + "\n", "pressure");
  cli::run(c1);
  cli::run(c4);
  CHECK(slurp(dir1 / "detail.csv") == slurp(dir4 / "detail.csv"));
}

TEST_CASE("dobrushin run reports the 2D threshold") {
  const auto dir = fresh_dir("dobrushin");
  auto cfg = parse("d = 2\nkernel = nn\nkappa = 0.2\nout = " + dir.string() + "\n",
                   "dobrushin");
  const auto run = cli::run(cfg);
  CHECK(run.exit_code == 0);
  const std::string summary = slurp(dir / "summary.json");
  double kappa1 = 0.0, inside = -1.0;
  {
    auto pos = summary.find("\"kappa1\"");
    auto colon = summary.find(':', summary.find("value", pos));
    kappa1 = std::stod(summary.substr(colon + 1));
    pos = summary.find("\"inside\"");
    colon = summary.find(':', summary.find("value", pos));
    inside = std::stod(summary.substr(colon + 1));
  }
  CHECK(kappa1 == doctest::Approx(0.125));
  CHECK(inside == 0.0);
}

TEST_CASE("validation failures reject before computing") {
  const auto dir = fresh_dir("invalid");
  // geometry missing entirely
  auto cfg = parse("kernel = nn\nout = " + dir.string() + "\n", "pressure");
  CHECK_THROWS_AS(cli::run(cfg), ValidationError);
  // negative beta caught by parameter validation
  auto cfg2 = parse("L = 4\nbeta = -1\nout = " + dir.string() + "\n", "pressure");
  CHECK_THROWS_AS(cli::run(cfg2), ValidationError);
  // unknown engine
  auto cfg3 = parse("L = 4\nengine = magic\nout = " + dir.string() + "\n", "pressure");
  CHECK_THROWS_AS(cli::run(cfg3), ValidationError);
}

TEST_CASE("plot emitters honor their row contracts") {
  // F(q) curve: 101 grid points -> 101 data rows + 1 header
  {
    std::ostringstream out;
    std::vector<std::vector<double>> rows;
    for (int i = 0; i <= 100; ++i)
      rows.push_back({i / 100.0, 1.0 + i * 1e-3, 1e-4});
    cli::emit_fq_curve(out, 0x1234, rows);
    std::istringstream in(out.str());
    std::string line;
    int n_lines = 0, n_comments = 0;
    while (std::getline(in, line)) {
      ++n_lines;
      if (!line.empty() && line[0] == '#') ++n_comments;
    }
    CHECK(n_lines == 102);
    CHECK(n_comments == 1);
    CHECK(out.str().find("config_hash=1234") != std::string::npos);
  }

  // histogram: counts sum to the sample count
  {
    std::ostringstream out;
    const std::vector<double> edges{0.0, 0.5, 1.0, 1.5};
    const std::vector<std::int64_t> counts{900, 600, 500};
    cli::emit_histogram(out, 1, edges, counts);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);  // header
    std::int64_t total = 0;
    double lo, hi;
    std::int64_t c;
    while (in >> lo >> hi >> c) total += c;
    CHECK(total == 2000);
  }

  // variance table: one row per size, monotone volume column
  {
    std::ostringstream out;
    const std::vector<std::int64_t> volumes{9, 13, 17, 21};
    const std::vector<double> variances{4e-3, 3e-3, 2e-3, 1e-3};
    cli::emit_variance_table(out, 2, volumes, variances);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    std::int64_t prev = 0, vol;
    double var;
    int rows = 0;
    while (in >> vol >> var) {
      CHECK(vol > prev);
      prev = vol;
      ++rows;
    }
    CHECK(rows == 4);
  }
}

TEST_CASE("mc-validate subcommand produces sound diagnostics") {
  const auto dir = fresh_dir("mcvalidate");
  auto cfg = parse("L = 6\nkernel = nn\nkappa = 0.1\nbeta = 0.3\nh = 0.4\nsamples = 2\n"
                   "burn_in = 300\nsweeps = 3000\nseed = 5\nout = " +
                       dir.string() + "\n",
                   "mc-validate");
  const auto run = cli::run(cfg);
  CHECK(run.exit_code == 0);
  const std::string summary = slurp(dir / "summary.json");
  double l1 = 1.0;
  {
    const auto pos = summary.find("two_spin_stationarity_l1");
    const auto colon = summary.find(':', summary.find("value", pos));
    l1 = std::stod(summary.substr(colon + 1));
  }
  CHECK(l1 <= 1e-10);
}
