#include "mpsim/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace mpsim {

using nlohmann::ordered_json;

std::int64_t jain_fairness_q12(const std::vector<std::uint64_t>& counts) {
  if (counts.empty()) return 1'000'000'000'000LL;
  long double sum = 0.0L;
  long double sq = 0.0L;
  for (std::uint64_t c : counts) {
    sum += static_cast<long double>(c);
    sq += static_cast<long double>(c) * static_cast<long double>(c);
  }
  if (sq == 0.0L) return 1'000'000'000'000LL;
  long double jain = sum * sum / (static_cast<long double>(counts.size()) * sq);
  return static_cast<std::int64_t>(llroundl(jain * 1e12L));
}

std::string report_lines(const MetricsReport& r) {
  std::ostringstream out;
  auto emit = [&](const ordered_json& j) { out << j.dump() << "\n"; };

  emit({{"kind", "meta"},
        {"seed", r.seed},
        {"ticks", r.ticks},
        {"epoch_ticks", r.epoch_ticks},
        {"final_state_hash", r.final_state_hash_hex}});

  for (const auto& e : r.epochs) {
    ordered_json j;
    j["kind"] = "epoch";
    j["index"] = e.index;
    j["tick"] = e.at_tick;
    j["pool_minted"] = e.pool_minted_base;
    j["pool_distributed"] = e.pool_distributed_base;
    j["allocations"] = e.allocations_base;
    j["reputation_q12"] = e.reputation_q12;
    j["circulating"] = e.circulating_base;
    j["total_minted"] = e.total_minted_base;
    j["circulating_delta"] = e.circulating_delta_base;
    j["locks"] = e.locks_base;
    j["unlocks"] = e.unlocks_base;
    j["checkpoint_height"] = e.checkpoint_height;
    j["checkpoint_committed"] = e.checkpoint_committed;
    j["conflicting_commit"] = e.conflicting_commit;
    emit(j);
  }

  {
    ordered_json j;
    j["kind"] = "latency";
    ordered_json hist = ordered_json::object();
    for (const auto& [ticks, count] : r.latency_hist)
      hist[std::to_string(ticks)] = count;
    j["hist"] = hist;
    emit(j);
  }
  emit({{"kind", "fairness"},
        {"jain_q12", r.fairness_q12},
        {"client_served", r.client_served}});
  {
    ordered_json j;
    j["kind"] = "adversary";
    j["ids"] = r.adversary_ids;
    j["reward"] = r.adversary_reward_base;
    j["total_reward"] = r.total_reward_base;
    j["expected_share_q12"] = r.adversary_expected_share_q12;
    j["flooder_max_group_window"] = r.flooder_max_group_window;
    emit(j);
  }
  emit({{"kind", "reputation_final"},
        {"reputation_q12", r.final_reputation_q12},
        {"ratings_received", r.ratings_received}});
  {
    ordered_json j;
    j["kind"] = "restrictions";
    ordered_json list = ordered_json::array();
    for (const auto& ev : r.restrictions)
      list.push_back({{"client", ev.client},
                      {"tick", ev.at},
                      {"duration", ev.duration},
                      {"level", ev.level}});
    j["events"] = list;
    emit(j);
  }
  emit({{"kind", "counters"},
        {"orders_put", r.orders_put},
        {"orders_accepted", r.orders_accepted},
        {"orders_completed", r.orders_completed},
        {"orders_expired", r.orders_expired},
        {"ratings_accepted", r.ratings_accepted},
        {"ratings_rejected_restricted", r.ratings_rejected_restricted},
        {"puts_rejected_frozen", r.puts_rejected_frozen},
        {"puts_rejected_ledger", r.puts_rejected_ledger},
        {"routing_failures", r.routing_failures}});
  emit({{"kind", "audit"},
        {"emitted", r.emitted},
        {"processed", r.processed},
        {"dropped", r.dropped}});
  return out.str();
}

Status write_report(const MetricsReport& report, const std::string& path) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) return Err::ConfigInvalid;
    out << report_lines(report);
    if (!out.good()) return Err::ConfigInvalid;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    return Err::ConfigInvalid;
  }
  return Status::ok_status();
}

namespace {

std::string fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

std::string summary_table(const MetricsReport& r) {
  std::ostringstream out;
  out << "run summary\n";
  out << "  seed " << r.seed << ", " << r.ticks << " ticks, "
      << r.epochs.size() << " epochs\n";
  out << "  orders: " << r.orders_put << " put, " << r.orders_accepted
      << " accepted, " << r.orders_completed << " completed, "
      << r.orders_expired << " expired\n";
  out << "  ratings: " << r.ratings_accepted << " accepted, "
      << r.ratings_rejected_restricted << " rejected while restricted\n";
  if (!r.epochs.empty()) {
    const auto& last = r.epochs.back();
    out << "  circulating at end: " << last.circulating_base
        << " base units (delta " << last.circulating_delta_base
        << " last epoch)\n";
  }
  out << "  fairness (Jain, q12): " << r.fairness_q12 << "\n";
  if (!r.adversary_ids.empty()) {
    out << "  adversary reward: " << r.adversary_reward_base << " of "
        << r.total_reward_base << " base units\n";
  }
  out << "  throughput: " << fixed3(r.wall_cycles_per_sec)
      << " task cycles/sec (wall clock, not in report file)\n";
  return out.str();
}

Result<DiffReport> compare_runs(const MetricsReport& baseline,
                                const MetricsReport& variant) {
  if (baseline.ticks != variant.ticks ||
      baseline.epoch_ticks != variant.epoch_ticks ||
      baseline.epochs.size() != variant.epochs.size())
    return Err::ShapeMismatch;

  std::set<MinerId> base_roster, var_roster;
  for (const auto& [id, rep] : baseline.final_reputation_q12) {
    (void)rep;
    base_roster.insert(id);
  }
  for (const auto& [id, rep] : variant.final_reputation_q12) {
    (void)rep;
    var_roster.insert(id);
  }
  if (base_roster != var_roster) return Err::ShapeMismatch;

  // Reputation deltas cover miners that are honest in both runs; the runs may
  // differ in which roster members play the adversary.
  std::set<std::string> adv(baseline.adversary_ids.begin(),
                            baseline.adversary_ids.end());
  adv.insert(variant.adversary_ids.begin(), variant.adversary_ids.end());
  std::set<MinerId> base_honest;
  for (const auto& id : base_roster)
    if (adv.count(id) == 0) base_honest.insert(id);

  DiffReport diff;
  auto share_q12 = [](const MetricsReport& r) -> std::int64_t {
    if (r.total_reward_base == 0) return 0;
    long double s = static_cast<long double>(r.adversary_reward_base) /
                    static_cast<long double>(r.total_reward_base);
    return static_cast<std::int64_t>(llroundl(s * 1e12L));
  };
  diff.adversary_share_delta_q12 = share_q12(variant) - share_q12(baseline);
  for (const auto& id : base_honest) {
    diff.reputation_delta_q12[id] = variant.final_reputation_q12.at(id) -
                                    baseline.final_reputation_q12.at(id);
  }
  diff.throughput_delta =
      variant.wall_cycles_per_sec - baseline.wall_cycles_per_sec;
  diff.identical = diff.adversary_share_delta_q12 == 0;
  for (const auto& [id, d] : diff.reputation_delta_q12)
    if (d != 0) diff.identical = false;
  return diff;
}

std::string diff_lines(const DiffReport& diff) {
  std::ostringstream out;
  ordered_json j;
  j["kind"] = "diff";
  j["adversary_share_delta_q12"] = diff.adversary_share_delta_q12;
  j["reputation_delta_q12"] = diff.reputation_delta_q12;
  j["identical"] = diff.identical;
  out << j.dump() << "\n";
  return out.str();
}

}  // namespace mpsim
