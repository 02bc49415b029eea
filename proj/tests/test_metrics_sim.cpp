#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "doctest.h"
#include "mpsim/metrics.hpp"
#include "mpsim/scenario.hpp"
#include "mpsim/sim.hpp"

using namespace mpsim;

namespace {

MetricsReport small_report() {
  MetricsReport r;
  r.seed = 9;
  r.ticks = 100;
  r.epoch_ticks = 50;
  r.epochs.resize(2);
  r.epochs[0].index = 1;
  r.epochs[0].at_tick = 50;
  r.epochs[1].index = 2;
  r.epochs[1].at_tick = 100;
  r.latency_hist[2] = 10;
  r.client_served["c0"] = 10;
  r.fairness_q12 = 1'000'000'000'000LL;
  r.final_reputation_q12 = {{"m0", 50'000'000'000'000LL},
                            {"m1", 50'000'000'000'000LL}};
  r.adversary_ids = {"m1"};
  r.adversary_reward_base = 10;
  r.total_reward_base = 100;
  r.final_state_hash_hex = "00";
  r.wall_cycles_per_sec = 123.456;
  return r;
}

bool holds_float(const nlohmann::json& j) {
  if (j.is_number_float()) return true;
  if (j.is_object() || j.is_array())
    for (const auto& v : j)
      if (holds_float(v)) return true;
  return false;
}

const char* kTinyScenario = R"json({
  "seed": 5,
  "ticks": 60,
  "epoch_ticks": 30,
  "coordinators": {"count": 5, "threshold": 3},
  "services": [{"id": "text", "weight": 1.0, "latency": 1}],
  "clients": [{"prefix": "c", "count": 2, "service": "text"}],
  "miners": [{"prefix": "m", "count": 2, "services": ["text"]}]
})json";

}  // namespace

TEST_CASE("Jain's index rewards even service and penalizes skew") {
  CHECK(jain_fairness_q12({5, 5, 5}) == 1'000'000'000'000LL);
  CHECK(jain_fairness_q12({1, 0}) == 500'000'000'000LL);
  CHECK(jain_fairness_q12({}) == 1'000'000'000'000LL);
  CHECK(jain_fairness_q12({0, 0, 0}) == 1'000'000'000'000LL);
}

TEST_CASE("the report file carries integers only and no wall clock") {
  auto report = small_report();
  std::string lines = report_lines(report);
  CHECK(lines.find("123.4") == std::string::npos);
  CHECK(lines.find("wall") == std::string::npos);

  std::istringstream in(lines);
  std::string line;
  std::size_t parsed = 0;
  while (std::getline(in, line)) {
    auto j = nlohmann::json::parse(line);
    CHECK_FALSE(holds_float(j));
    parsed += 1;
  }
  // meta, two epochs, latency, fairness, adversary, reputation_final,
  // restrictions, counters, audit
  CHECK(parsed == 10);
}

TEST_CASE("report writing is atomic and faithful") {
  auto report = small_report();
  std::string path = "metrics_test_report.jsonl";
  REQUIRE(write_report(report, path).ok());
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == report_lines(report));
  std::remove(path.c_str());

  CHECK(write_report(report, "/nonexistent/dir/report.jsonl").error() ==
        Err::ConfigInvalid);
}

TEST_CASE("run comparison requires the same shape and roster") {
  auto base = small_report();
  auto variant = small_report();

  auto longer = variant;
  longer.epochs.resize(3);
  CHECK(compare_runs(base, longer).error() == Err::ShapeMismatch);

  auto othercast = variant;
  othercast.final_reputation_q12.erase("m1");
  CHECK(compare_runs(base, othercast).error() == Err::ShapeMismatch);
}

TEST_CASE("comparing a run against itself is a fixed point") {
  auto base = small_report();
  auto diff = compare_runs(base, base);
  REQUIRE(diff.ok());
  CHECK(diff->identical);
  CHECK(diff->adversary_share_delta_q12 == 0);
  // the adversary roster is excluded from reputation deltas
  CHECK(diff->reputation_delta_q12.count("m1") == 0);
  CHECK(diff->reputation_delta_q12.at("m0") == 0);
}

TEST_CASE("an adversary gaining share shows up as a positive delta") {
  auto base = small_report();
  auto variant = small_report();
  variant.adversary_reward_base = 30;
  variant.final_reputation_q12["m0"] += 5;
  auto diff = compare_runs(base, variant);
  REQUIRE(diff.ok());
  // 30% against 10% of the pool
  CHECK(diff->adversary_share_delta_q12 == 200'000'000'000LL);
  CHECK(diff->reputation_delta_q12.at("m0") == 5);
  CHECK_FALSE(diff->identical);
}

TEST_CASE("equal seeds give byte-identical reports and state hashes") {
  std::string error;
  auto cfg = parse_scenario(kTinyScenario, error);
  REQUIRE(cfg.ok());

  auto first = run_scenario(cfg.value(), error);
  REQUIRE(first.ok());
  auto second = run_scenario(cfg.value(), error);
  REQUIRE(second.ok());

  CHECK(first->report.orders_completed > 0);
  CHECK(first->final_hash == second->final_hash);
  CHECK(report_lines(first->report) == report_lines(second->report));
}

TEST_CASE("changing the seed changes the run") {
  std::string error;
  auto cfg = parse_scenario(kTinyScenario, error);
  REQUIRE(cfg.ok());
  auto base = run_scenario(cfg.value(), error);
  REQUIRE(base.ok());

  auto reseeded = cfg.value();
  reseeded.seed = 6;
  auto other = run_scenario(reseeded, error);
  REQUIRE(other.ok());
  CHECK(base->final_hash != other->final_hash);
}
