#include "mpsim/scheduler.hpp"

#include <algorithm>

namespace mpsim {

Result<std::vector<std::uint64_t>> compute_weights(
    const std::vector<TokenAmount>& stakes) {
  if (stakes.empty()) return Err::EmptyBatch;
  TokenAmount s_min = stakes.front();
  for (TokenAmount s : stakes) {
    if (s.is_zero()) return Err::ZeroStake;
    s_min = std::min(s_min, s);
  }
  std::vector<std::uint64_t> weights;
  weights.reserve(stakes.size());
  for (TokenAmount s : stakes)
    weights.push_back(s.base_units() / s_min.base_units());
  return weights;
}

Result<Schedule> build_schedule(const RequestBatch& batch) {
  if (batch.entries.empty()) return Err::EmptyBatch;

  std::vector<std::size_t> order(batch.entries.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return batch.entries[a].client < batch.entries[b].client;
  });

  std::vector<TokenAmount> stakes;
  stakes.reserve(order.size());
  for (std::size_t idx : order) stakes.push_back(batch.entries[idx].stake);
  auto weights = compute_weights(stakes);
  if (!weights) return weights.error();

  std::uint64_t w_max = 0;
  for (std::uint64_t w : weights.value()) w_max = std::max(w_max, w);

  Schedule schedule;
  std::vector<std::size_t> cursor(order.size(), 0);
  for (std::uint64_t round = 1; round <= w_max; ++round) {
    bool any = false;
    for (std::size_t k = 0; k < order.size(); ++k) {
      const BatchEntry& entry = batch.entries[order[k]];
      if (weights.value()[k] < round) continue;
      if (cursor[k] >= entry.request_ids.size()) continue;
      schedule.serve_order.push_back(entry.request_ids[cursor[k]++]);
      any = true;
    }
    if (any) schedule.rounds_used = static_cast<std::uint32_t>(round);
  }

  for (std::size_t k = 0; k < order.size(); ++k) {
    const BatchEntry& entry = batch.entries[order[k]];
    for (std::size_t i = cursor[k]; i < entry.request_ids.size(); ++i)
      schedule.deferred.push_back(entry.request_ids[i]);
  }
  return schedule;
}

Status set_status(NodeInfo& node, MinerStatus next) {
  switch (node.status) {
    case MinerStatus::Ready:
      if (next == MinerStatus::Busy || next == MinerStatus::Ready) {
        node.status = next;
        return Status();
      }
      break;
    case MinerStatus::Busy:
      if (next == MinerStatus::Ready || next == MinerStatus::Busy) {
        node.status = next;
        return Status();
      }
      break;
    case MinerStatus::Unregistered:
      break;
  }
  return Err::IllegalTransition;
}

}  // namespace mpsim
