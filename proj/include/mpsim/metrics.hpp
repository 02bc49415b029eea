// Run metrics and their serialized form. Everything written to the report
// file is integer-valued (fixed-point where the source is fractional), so two
// runs with the same seed produce byte-identical files. Wall-clock throughput
// is kept in memory for the human summary and never serialized.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mpsim/types.hpp"

namespace mpsim {

struct EpochMetrics {
  std::uint64_t index = 0;
  Tick at_tick = 0;
  std::uint64_t pool_minted_base = 0;
  std::uint64_t pool_distributed_base = 0;
  std::map<MinerId, std::uint64_t> allocations_base;
  std::map<MinerId, std::int64_t> reputation_q12;
  std::uint64_t circulating_base = 0;
  std::uint64_t total_minted_base = 0;
  std::int64_t circulating_delta_base = 0;
  std::uint64_t locks_base = 0;
  std::uint64_t unlocks_base = 0;
  std::uint64_t checkpoint_height = 0;
  bool checkpoint_committed = false;
  bool conflicting_commit = false;
};

struct RestrictionEvent {
  AccountId client;
  Tick at = 0;
  Tick duration = 0;
  std::uint32_t level = 0;
};

struct MetricsReport {
  std::uint64_t seed = 0;
  Tick ticks = 0;
  Tick epoch_ticks = 0;

  std::vector<EpochMetrics> epochs;
  std::map<std::uint64_t, std::uint64_t> latency_hist;  // ticks -> count
  std::map<AccountId, std::uint64_t> client_served;
  std::int64_t fairness_q12 = 0;  // Jain's index over client_served

  std::vector<std::string> adversary_ids;
  std::uint64_t adversary_reward_base = 0;
  std::uint64_t total_reward_base = 0;
  std::int64_t adversary_expected_share_q12 = 0;  // mean selection share
  std::uint32_t flooder_max_group_window = 0;

  std::map<MinerId, std::int64_t> final_reputation_q12;
  std::map<MinerId, std::uint64_t> ratings_received;
  std::vector<RestrictionEvent> restrictions;

  std::uint64_t orders_put = 0;
  std::uint64_t orders_accepted = 0;
  std::uint64_t orders_completed = 0;
  std::uint64_t orders_expired = 0;
  std::uint64_t ratings_accepted = 0;
  std::uint64_t ratings_rejected_restricted = 0;
  std::uint64_t puts_rejected_frozen = 0;
  std::uint64_t puts_rejected_ledger = 0;
  std::uint64_t routing_failures = 0;

  std::map<std::string, std::uint64_t> emitted;  // audit, by message kind
  std::map<std::string, std::uint64_t> processed;
  std::map<std::string, std::uint64_t> dropped;

  std::string final_state_hash_hex;

  double wall_cycles_per_sec = 0.0;  // summary only, never serialized
};

// Line-delimited records; written atomically (temp file, then rename).
Status write_report(const MetricsReport& report, const std::string& path);
std::string report_lines(const MetricsReport& report);
std::string summary_table(const MetricsReport& report);

struct DiffReport {
  std::int64_t adversary_share_delta_q12 = 0;
  std::map<MinerId, std::int64_t> reputation_delta_q12;
  double throughput_delta = 0.0;
  bool identical = false;
};

// Baseline vs variant from configs that differ only in the adversary roster.
Result<DiffReport> compare_runs(const MetricsReport& baseline,
                                const MetricsReport& variant);
std::string diff_lines(const DiffReport& diff);

std::int64_t jain_fairness_q12(const std::vector<std::uint64_t>& counts);

}  // namespace mpsim
