#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <string>

#include "ria/csv.hpp"
#include "ria/events.hpp"
#include "ria/series.hpp"
#include "ria/synth.hpp"

using json = nlohmann::json;
namespace fs = std::filesystem;
using namespace ria;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string("\"") + RIA_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path work_dir() {
  const fs::path d = fs::temp_directory_path() / "ria_cli_test";
  fs::create_directories(d);
  return d;
}

// Price path driven by heavy-tailed returns; epoch-minute timestamps.
std::string write_price_csv(const fs::path& path, std::size_t n,
                            std::uint64_t seed) {
  const auto r = synth_student_returns(n, 4.0, seed);
  std::ofstream f(path);
  f << "timestamp,price\n";
  double p = 100.0;
  for (std::size_t i = 0; i < n; ++i) {
    p *= std::exp(0.01 * r.values[i]);
    f << i << "," << format_number(p) << "\n";
  }
  return path.string();
}

NormalizedReturnSeries library_returns(const std::string& csv) {
  return normalize_returns(compute_log_returns(read_price_csv(csv)));
}

}  // namespace

TEST_CASE("intervals subcommand matches the library") {
  const auto dir = work_dir();
  const auto prices = write_price_csv(dir / "prices.csv", 50000, 11);
  const auto base = (dir / "iv_m2").string();
  REQUIRE(run_cli("intervals --input " + prices + " --q -2 --out " + base) == 0);

  const Table t = read_table(base + ".csv", {"interval"});
  std::ifstream mf(base + ".meta.json");
  REQUIRE(mf.good());
  json meta;
  mf >> meta;

  const auto iv = extract_intervals(library_returns(prices), ThresholdSpec{-2.0});
  REQUIRE(t.rows() == iv.intervals.size());
  for (std::size_t i = 0; i < iv.intervals.size(); ++i)
    CHECK(static_cast<std::int64_t>(t.data[0][i]) == iv.intervals[i]);
  CHECK(meta.at("n_events").get<std::size_t>() == iv.n_events);
  CHECK(meta.at("n_returns").get<std::size_t>() == iv.n_returns);
  CHECK(meta.at("mean_interval").get<double>() ==
        doctest::Approx(iv.mean_interval).epsilon(1e-11));
  CHECK(meta.at("q").get<double>() == -2.0);
}

TEST_CASE("pdf subcommand emits a normalized histogram") {
  const auto dir = work_dir();
  const auto prices = write_price_csv(dir / "prices2.csv", 50000, 12);
  const auto base = (dir / "iv2").string();
  REQUIRE(run_cli("intervals --input " + prices + " --q 2 --out " + base) == 0);
  const auto out = (dir / "pdf.csv").string();
  REQUIRE(run_cli("pdf --intervals " + base + ".csv --out " + out) == 0);

  const Table t = read_table(out, {"x", "density", "count"});
  CHECK(t.rows() > 0);
  for (std::size_t i = 1; i < t.rows(); ++i)
    CHECK(t.data[0][i] > t.data[0][i - 1]);  // centers ascending
  for (double d : t.data[1]) CHECK(d >= 0.0);

  // conditional variant runs and validates the bin index
  const auto cout_ = (dir / "cpdf.csv").string();
  CHECK(run_cli("pdf --intervals " + base + ".csv --quartile-bin 2 --out " +
                cout_) == 0);
  CHECK(run_cli("pdf --intervals " + base + ".csv --quartile-bin 7 --out " +
                cout_) == 2);
}

TEST_CASE("synth + fit + gof round trip") {
  const auto dir = work_dir();
  const auto samples = (dir / "pl.csv").string();
  REQUIRE(run_cli("synth --kind powerlaw --n 20000 --seed 5 --delta 2.2 "
                  "--xmin 1 --out " + samples) == 0);
  const auto fitj = (dir / "fit.json").string();
  REQUIRE(run_cli("fit --samples " + samples + " --out " + fitj) == 0);

  std::ifstream ff(fitj);
  json jf;
  ff >> jf;
  CHECK(jf.at("schema_version").get<int>() == 1);
  const double delta = jf.at("fit").at("delta").get<double>();
  CHECK(delta == doctest::Approx(2.2).epsilon(0.05));

  const auto gofj = (dir / "gof.json").string();
  REQUIRE(run_cli("gof --samples " + samples + " --fit " + fitj +
                  " --n-bootstrap 100 --seed 3 --out " + gofj) == 0);
  std::ifstream gf(gofj);
  json jg;
  gf >> jg;
  CHECK(jg.at("p_ks").get<double>() > 0.01);
  CHECK(jg.at("n_bootstrap").get<int>() == 100);

  // same seed, same result
  const auto gofj2 = (dir / "gof2.json").string();
  REQUIRE(run_cli("gof --samples " + samples + " --fit " + fitj +
                  " --n-bootstrap 100 --seed 3 --out " + gofj2) == 0);
  std::ifstream g2(gofj2);
  json jg2;
  g2 >> jg2;
  CHECK(jg == jg2);
}

TEST_CASE("dfa subcommand writes fluctuation and exponent tables") {
  const auto dir = work_dir();
  const auto series = (dir / "cg.csv").string();
  REQUIRE(run_cli("synth --kind corr-gauss --n 16384 --alpha 0.8 --seed 4 "
                  "--out " + series) == 0);
  const auto base = (dir / "dfa").string();
  REQUIRE(run_cli("dfa --series " + series + " --out " + base) == 0);
  const Table f = read_table(base + ".csv", {"l", "F"});
  CHECK(f.rows() >= 10);
  const Table a = read_table(base + "_alpha.csv", {"alpha", "alpha_se"});
  REQUIRE(a.rows() == 1);
  CHECK(a.data[0][0] == doctest::Approx(0.8).epsilon(0.1));
}

TEST_CASE("hazard subcommand pairs empirical and theoretical columns") {
  const auto dir = work_dir();
  const auto samples = (dir / "pl2.csv").string();
  REQUIRE(run_cli("synth --kind powerlaw --n 30000 --seed 6 --delta 2.2 "
                  "--xmin 1 --out " + samples) == 0);
  const auto fitj = (dir / "fit2.json").string();
  REQUIRE(run_cli("fit --samples " + samples + " --out " + fitj) == 0);

  // dress the samples as an intervals set (scaled units, mean 1)
  const Table s = read_table(samples, {"x"});
  Table iv;
  iv.columns = {"interval"};
  iv.data.resize(1);
  for (double x : s.data[0]) iv.data[0].push_back(std::ceil(x * 10.0));
  const auto ivbase = (dir / "iv_pl").string();
  write_table(ivbase + ".csv", iv);
  double sum = 0.0;
  for (double v : iv.data[0]) sum += v;
  std::ofstream mf(ivbase + ".meta.json");
  mf << "{\"schema_version\":1,\"q\":-2,\"n_returns\":"
     << static_cast<long long>(sum) << ",\"n_events\":" << iv.data[0].size() + 1
     << ",\"mean_interval\":" << sum / static_cast<double>(iv.data[0].size() + 1)
     << "}\n";
  mf.close();

  const auto out = (dir / "hazard.csv").string();
  REQUIRE(run_cli("hazard --intervals " + ivbase + ".csv --fit " + fitj +
                  " --delta-t 5 --out " + out) == 0);
  const Table h = read_table(out, {"t", "w_empirical", "w_theoretical", "valid"});
  CHECK(h.rows() > 0);
  for (std::size_t i = 0; i < h.rows(); ++i) {
    CHECK(h.data[1][i] >= 0.0);
    CHECK(h.data[1][i] <= 1.0);
    CHECK(h.data[2][i] <= 1.0);
  }
}

TEST_CASE("exit codes: config, data, numeric") {
  const auto dir = work_dir();
  const auto prices = write_price_csv(dir / "prices3.csv", 20000, 13);
  // |q| < 1 -> config error
  CHECK(run_cli("intervals --input " + prices + " --q 0.5 --out " +
                (dir / "x").string()) == 2);
  // missing file -> data error
  CHECK(run_cli("intervals --input " + (dir / "nope.csv").string() +
                " --q -2 --out " + (dir / "x").string()) == 3);
  // gof without seed -> config error
  CHECK(run_cli("gof --samples a.csv --fit b.json --out c.json") == 2);
  // run without seed -> config error
  CHECK(run_cli("run --input " + prices + " --output-dir " +
                (dir / "out_noseed").string()) == 2);
  // data error: below the minimum sample count for a fit
  const auto tiny = (dir / "tiny.csv").string();
  {
    std::ofstream f(tiny);
    f << "x\n1\n1.1\n1.2\n";
  }
  CHECK(run_cli("fit --samples " + tiny + " --out " +
                (dir / "tinyfit.json").string()) == 3);
  // numeric failure: enough samples but every candidate tail degenerate
  const auto flat = (dir / "flat.csv").string();
  {
    std::ofstream f(flat);
    f << "x\n";
    for (int i = 0; i < 60; ++i) f << "2\n";
  }
  CHECK(run_cli("fit --samples " + flat + " --out " +
                (dir / "flatfit.json").string()) == 4);
}

TEST_CASE("run subcommand writes a manifest covering every output") {
  const auto dir = work_dir();
  const auto prices = write_price_csv(dir / "inst.csv", 120000, 14);
  const auto out = (dir / "pipe").string();
  fs::remove_all(out);
  REQUIRE(run_cli("run --input " + prices + " --output-dir " + out +
                  " --thresholds -2 2 --n-bootstrap 100 --seed 7") == 0);

  std::ifstream mf(out + "/manifest.json");
  REQUIRE(mf.good());
  json m;
  mf >> m;
  CHECK(m.at("schema_version").get<int>() == 1);
  CHECK(m.at("config").at("seed").get<std::uint64_t>() == 7);
  CHECK(m.at("failures").empty());
  const auto& files = m.at("files");
  CHECK(files.size() > 10);
  for (const auto& f : files) {
    const auto rel = f.at("path").get<std::string>();
    const auto full = out + "/" + rel;
    REQUIRE_MESSAGE(fs::exists(full), rel);
    CHECK(file_checksum(full) == f.at("fnv1a64").get<std::string>());
  }
}
