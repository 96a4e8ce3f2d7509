// Experiment CLI: thin shell over the gwreg shared library.
//
//   gwreg gen    --config cfg.json --out DIR
//   gwreg run    --config cfg.json --out DIR [--seeds N] [--jobs N]
//   gwreg report --out RUN_DIR
//   gwreg plot   --out RUN_DIR
//
// Exit codes: 0 success, 2 config error, 3 data/IO error, 4 invariant
// violation.

#include <CLI11.hpp>

#include "gwreg.h"

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

int read_config(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read config file '" << path << "'\n";
    return GWREG_ERR_DATA;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  out = buf.str();
  return GWREG_OK;
}

int finish(gwreg_status status) {
  if (status != GWREG_OK) {
    std::cerr << "error: " << gwreg_last_error() << "\n";
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online prediction experiments with per-group regret tracking"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(gwreg_version()));

  std::string config_path, out_dir;
  int seeds = 0, jobs = 1;

  auto* gen = app.add_subcommand("gen", "Write a synthetic dataset CSV");
  gen->add_option("--config", config_path, "Config JSON path")->required();
  gen->add_option("--out", out_dir, "Output directory")->required();

  auto* run = app.add_subcommand("run", "Run the configured experiment");
  run->add_option("--config", config_path, "Config JSON path")->required();
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--seeds", seeds, "Override the seed list with 0..N-1");
  run->add_option("--jobs", jobs, "Seeds run in parallel");

  auto* report = app.add_subcommand("report",
                                    "Rebuild summary.csv from saved ledgers");
  report->add_option("--out", out_dir, "Run directory")->required();

  auto* plot = app.add_subcommand("plot", "Render per-group regret SVGs");
  plot->add_option("--out", out_dir, "Run directory")->required();

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed() || run->parsed()) {
    std::string config;
    if (const int rc = read_config(config_path, config); rc != GWREG_OK) {
      return rc;
    }
    if (gen->parsed()) {
      return finish(gwreg_gen(config.c_str(), out_dir.c_str()));
    }
    return finish(gwreg_run(config.c_str(), out_dir.c_str(), seeds, jobs));
  }
  if (report->parsed()) return finish(gwreg_report(out_dir.c_str()));
  return finish(gwreg_plot(out_dir.c_str()));
}
