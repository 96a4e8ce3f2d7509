#include <doctest.h>

#include "gwreg/experiment.hpp"

#include "../support/xml_check.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace gwreg;
namespace fs = std::filesystem;

namespace {

const char* kTinyConfig = R"({
  "task": "regression",
  "data": {"source": "synthetic", "T": 300, "aggregation": "mean", "gen_seed": 5},
  "ordering": {"mode": "shuffle"},
  "seeds": [0, 1],
  "hedge_mode": "sample",
  "curve_points": 20
})";

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / ("gwreg_test_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("config parsing rejects mistakes loudly") {
  CHECK_THROWS_AS(parse_config("not json"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"task": "regression"})"), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_config(
          R"({"data": {"source": "synthetic", "T": 10}, "typo_key": 1})"),
      doctest::Contains("unknown key 'typo_key'"), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_config(R"({"data": {"source": "synthetic", "T": 10, "Tee": 1}})"),
      doctest::Contains("unknown key"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"data": {"source": "synthetic", "T": 0}})"),
                  ConfigError);
  CHECK_THROWS_AS(
      parse_config(
          R"({"data": {"source": "synthetic", "T": 5}, "hedge_mode": "zap"})"),
      ConfigError);
  CHECK_THROWS_AS(
      parse_config(
          R"({"data": {"source": "synthetic", "T": 5}, "seeds": []})"),
      ConfigError);
  // linopt knobs on a regression task
  CHECK_THROWS_AS(
      parse_config(
          R"({"data": {"source": "synthetic", "T": 5}, "bound_a": 1.0})"),
      ConfigError);

  const auto cfg = parse_config(kTinyConfig);
  CHECK(cfg.task == Task::regression);
  CHECK(cfg.seeds.size() == 2);
  CHECK(cfg.synthetic->rounds == 300);

  const auto cfg2 = parse_config(kTinyConfig);
  CHECK(cfg.config_hash == cfg2.config_hash);
  CHECK(cfg.canonical_json == cfg2.canonical_json);

  const auto overridden = parse_config(kTinyConfig, 5);
  CHECK(overridden.seeds == std::vector<uint64_t>{0, 1, 2, 3, 4});
  CHECK(overridden.config_hash != cfg.config_hash);
}

TEST_CASE("gen writes a deterministic dataset") {
  TempDir dir("gen");
  const auto cfg = parse_config(kTinyConfig);
  cmd_gen(cfg, (dir.path / "a").string());
  cmd_gen(cfg, (dir.path / "b").string());

  const auto csv_a = slurp(dir.path / "a" / "synthetic.csv");
  const auto csv_b = slurp(dir.path / "b" / "synthetic.csv");
  CHECK(csv_a == csv_b);
  int lines = 0;
  for (char c : csv_a) lines += c == '\n';
  CHECK(lines == 301);
  CHECK(slurp(dir.path / "a" / "gen_meta.json").find("config_hash") !=
        std::string::npos);
}

TEST_CASE("run produces summary, curves, ledgers, all reproducible") {
  TempDir dir("run");
  const auto cfg = parse_config(kTinyConfig);
  cmd_run(cfg, (dir.path / "r1").string(), 1);
  cmd_run(cfg, (dir.path / "r2").string(), 1);

  const auto summary = slurp(dir.path / "r1" / "summary.csv");
  CHECK(summary == slurp(dir.path / "r2" / "summary.csv"));

  // 6 group rows after the comment and header lines
  int lines = 0;
  for (char c : summary) lines += c == '\n';
  CHECK(lines == 8);
  CHECK(summary.find("circle,") != std::string::npos);
  CHECK(summary.find("always_on,") != std::string::npos);

  for (const char* group :
       {"circle", "square", "triangle", "green", "red", "always_on"}) {
    const auto p1 = dir.path / "r1" / "curves" / "seed0" /
                    (std::string(group) + ".csv");
    CHECK(fs::exists(p1));
    CHECK(slurp(p1) == slurp(dir.path / "r2" / "curves" / "seed0" /
                             (std::string(group) + ".csv")));
  }
  CHECK(fs::exists(dir.path / "r1" / "ledgers" / "seed1.json"));
  CHECK(slurp(dir.path / "r1" / "ledgers" / "seed1.json") ==
        slurp(dir.path / "r2" / "ledgers" / "seed1.json"));

  SUBCASE("report rebuilds the identical summary") {
    fs::remove(dir.path / "r1" / "summary.csv");
    cmd_report((dir.path / "r1").string());
    CHECK(slurp(dir.path / "r1" / "summary.csv") == summary);
  }

  SUBCASE("plot renders well-formed SVGs per group") {
    cmd_plot((dir.path / "r1").string());
    int count = 0;
    for (const auto& entry :
         fs::directory_iterator(dir.path / "r1" / "plots")) {
      CHECK(entry.path().extension() == ".svg");
      CHECK(testsupport::xml_well_formed(slurp(entry.path())));
      ++count;
    }
    CHECK(count == 6);
  }

  SUBCASE("plot fails cleanly on an empty curve file") {
    std::ofstream(dir.path / "r1" / "curves" / "seed0" / "circle.csv",
                  std::ios::trunc)
        << "";
    CHECK_THROWS_AS(cmd_plot((dir.path / "r1").string()), DataError);
  }
}

TEST_CASE("run propagates missing csv files as data errors") {
  const auto cfg = parse_config(R"({
    "data": {"source": "csv", "path": "/nonexistent/file.csv",
             "label": "y",
             "groups": [{"name": "g", "kind": "threshold", "column": "x"}]}
  })");
  TempDir dir("missing");
  CHECK_THROWS_AS(cmd_run(cfg, (dir.path / "out").string(), 1), DataError);
}

TEST_CASE("report on a directory without ledgers is a data error") {
  TempDir dir("report");
  CHECK_THROWS_AS(cmd_report(dir.path.string()), DataError);
}

TEST_CASE("linopt end to end on a small hypercube instance") {
  TempDir dir("linopt");
  // cost csv: alternating signs, one declared group
  std::ostringstream csv;
  csv << "c0,c1,g\n";
  Rng rng(15);
  for (int t = 0; t < 400; ++t) {
    const double flip = (t / 50) % 2 == 0 ? 1.0 : -1.0;
    csv << flip * rng.uniform01() << ',' << -flip * rng.uniform01() << ','
        << (t % 3 == 0 ? 1 : 0) << "\n";
  }
  const auto csv_path = dir.path / "costs.csv";
  std::ofstream(csv_path) << csv.str();

  std::ostringstream cfg_text;
  cfg_text << R"({
    "task": "linopt",
    "data": {"source": "cost_csv", "path": ")"
           << csv_path.string() << R"(", "dim": 2, "groups": ["g"]},
    "action_set": {"kind": "hypercube", "dim": 2},
    "bound_a": 2.0, "bound_c": 2.0,
    "seeds": [0, 1], "curve_points": 10
  })";
  const auto cfg = parse_config(cfg_text.str());
  cmd_run(cfg, (dir.path / "out").string(), 1);
  const auto summary = slurp(dir.path / "out" / "summary.csv");
  CHECK(summary.find("always_on,") != std::string::npos);
  CHECK(summary.find("g,") != std::string::npos);

  // rerun reproduces bytes
  cmd_run(cfg, (dir.path / "out2").string(), 1);
  CHECK(summary == slurp(dir.path / "out2" / "summary.csv"));
}
