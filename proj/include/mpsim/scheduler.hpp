// Interleaved weighted round-robin batching at a miner. Each client's weight
// is floor(stake / min stake); round i serves one FIFO request from every
// client whose weight is at least i and who still has requests pending.
// Requests past a client's weight are deferred to its next batch, which keeps
// the w_max-round bound on a batch without starving anyone.

#pragma once

#include <cstdint>
#include <vector>

#include "mpsim/ledger_types.hpp"
#include "mpsim/types.hpp"

namespace mpsim {

struct BatchEntry {
  AccountId client;
  std::vector<OrderId> request_ids;  // FIFO within the client
  TokenAmount stake;
};

struct RequestBatch {
  MinerId miner;
  std::vector<BatchEntry> entries;
  Tick opened_at = 0;
};

struct Schedule {
  std::vector<OrderId> serve_order;
  std::vector<OrderId> deferred;
  std::uint32_t rounds_used = 0;
};

// w_r = floor(s_r / s_min); every weight >= 1 since s_r >= s_min.
Result<std::vector<std::uint64_t>> compute_weights(
    const std::vector<TokenAmount>& stakes);

// Entries are taken in ascending AccountId within each round (the intra-round
// tie-break). Deterministic: equal batches produce equal schedules.
Result<Schedule> build_schedule(const RequestBatch& batch);

// Ready -> Busy on batch open, Busy -> Ready once the schedule is fully
// served. Unregistered nodes cannot transition.
Status set_status(NodeInfo& node, MinerStatus next);

}  // namespace mpsim
