#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mpsim/metrics.hpp"
#include "mpsim/scenario.hpp"
#include "mpsim/sim.hpp"
#include "mpsim/types.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitInvariant = 4;

int load_config(const std::string& path, mpsim::ScenarioConfig& cfg) {
  if (!std::filesystem::exists(path)) {
    std::fprintf(stderr, "error: %s: no such file\n", path.c_str());
    return kExitIo;
  }
  std::string error;
  auto r = mpsim::load_scenario(path, error);
  if (!r.ok()) {
    std::fprintf(stderr, "error: %s\n", error.c_str());
    return kExitConfig;
  }
  cfg = r.value();
  return kExitOk;
}

int run_one(const std::string& path,
            const std::optional<std::uint64_t>& seed_override,
            mpsim::SimResult& out) {
  mpsim::ScenarioConfig cfg;
  int rc = load_config(path, cfg);
  if (rc != kExitOk) return rc;
  if (seed_override.has_value()) cfg.seed = *seed_override;
  std::string error;
  auto res = mpsim::run_scenario(cfg, error);
  if (!res.ok()) {
    std::fprintf(stderr, "error: %s\n", error.c_str());
    return kExitConfig;
  }
  out = res.value();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic marketplace protocol simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string baseline_path;
  std::string variant_path;
  std::optional<std::uint64_t> seed_override;
  bool quiet = false;

  auto* validate =
      app.add_subcommand("validate", "parse and validate a scenario config");
  validate->add_option("config", config_path, "scenario JSON file")->required();

  auto* run = app.add_subcommand("run", "run a scenario");
  run->add_option("config", config_path, "scenario JSON file")->required();
  run->add_option("--out", out_path, "write the line-delimited report here");
  run->add_option("--seed", seed_override, "override the config seed");
  run->add_flag("--quiet", quiet, "suppress the human summary");

  auto* compare = app.add_subcommand(
      "compare", "run a baseline and a variant, print the delta");
  compare->add_option("baseline", baseline_path, "baseline scenario JSON")
      ->required();
  compare->add_option("variant", variant_path, "variant scenario JSON")
      ->required();
  compare->add_option("--seed", seed_override, "override both config seeds");

  auto* bench =
      app.add_subcommand("bench", "measure end-to-end task-cycle throughput");
  bench->add_option("config", config_path, "scenario JSON file")->required();
  bench->add_option("--seed", seed_override, "override the config seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (validate->parsed()) {
      mpsim::ScenarioConfig cfg;
      int rc = load_config(config_path, cfg);
      if (rc != kExitOk) return rc;
      std::printf("ok: %s\n", config_path.c_str());
      return kExitOk;
    }

    if (run->parsed()) {
      mpsim::SimResult res;
      int rc = run_one(config_path, seed_override, res);
      if (rc != kExitOk) return rc;
      if (!out_path.empty()) {
        auto st = mpsim::write_report(res.report, out_path);
        if (!st.ok()) {
          std::fprintf(stderr, "error: cannot write %s\n", out_path.c_str());
          return kExitIo;
        }
      }
      if (!quiet) std::fputs(mpsim::summary_table(res.report).c_str(), stdout);
      return kExitOk;
    }

    if (compare->parsed()) {
      mpsim::SimResult base;
      mpsim::SimResult variant;
      int rc = run_one(baseline_path, seed_override, base);
      if (rc != kExitOk) return rc;
      rc = run_one(variant_path, seed_override, variant);
      if (rc != kExitOk) return rc;
      auto diff = mpsim::compare_runs(base.report, variant.report);
      if (!diff.ok()) {
        std::fprintf(stderr,
                     "error: runs are not comparable (different shape)\n");
        return kExitConfig;
      }
      std::fputs(mpsim::diff_lines(diff.value()).c_str(), stdout);
      return kExitOk;
    }

    if (bench->parsed()) {
      mpsim::SimResult res;
      int rc = run_one(config_path, seed_override, res);
      if (rc != kExitOk) return rc;
      std::printf("task cycles completed: %llu\n",
                  static_cast<unsigned long long>(res.report.orders_completed));
      std::printf("task cycles per second: %.3f\n",
                  res.report.wall_cycles_per_sec);
      std::printf("throughput floor (1000/s): %s\n",
                  res.report.wall_cycles_per_sec >= 1000.0 ? "met" : "missed");
      return kExitOk;
    }
  } catch (const mpsim::InvariantViolation& e) {
    std::fprintf(stderr, "invariant violation: %s\n", e.what());
    return kExitInvariant;
  }
  return kExitOk;
}
