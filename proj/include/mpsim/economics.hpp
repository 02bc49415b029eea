#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mpsim/ledger.hpp"
#include "mpsim/token_state.hpp"
#include "mpsim/types.hpp"

namespace mpsim {

// Net token flows over one epoch, applied at the boundary.
struct EpochFlows {
  TokenAmount stake_locks;    // newly locked (stakes plus collateral)
  TokenAmount stake_unlocks;  // released back to circulation
  TokenAmount distributed;    // rewards paid out of the pool
};

struct EpochOutcome {
  TokenState state;
  TokenAmount pool_minted;
  std::int64_t circulating_delta_base;  // signed, in base units
};

// Mints one epoch's inflation into the pool, then applies the period's flows.
// circulating' = circulating + distributed + unlocks - locks; the delta goes
// negative exactly when locks outrun mint plus unlocks.
EpochOutcome advance_epoch(const TokenState& state, double annual_inflation,
                           std::uint32_t epochs_per_year,
                           const EpochFlows& flows);

// Settles a completed charged order: the coordinator fee is carved out of the
// escrowed price and the rest goes to the serving miner. Returns (miner_paid,
// fee). The first settled order between a pair bumps the miner's subscriber
// count.
Result<std::pair<TokenAmount, TokenAmount>> charged_payment(
    GlobalLedger& ledger, OrderId order_id, const FeePolicy& fee);

// -- provider listing -------------------------------------------------------

struct FactorWeights {
  double rating = 0.5;
  double subscribers = 0.2;
  double staked = 0.3;
};

struct ListingEntry {
  MinerId miner;
  double customer_rating = 1.0;  // 1..5 stars, affine in reputation
  std::uint64_t subscriber_count = 0;
  TokenAmount tokens_staked;
  std::set<ServiceTypeId> services;
};

// Snapshot of every registered provider as a listing row.
std::vector<ListingEntry> build_listing(const GlobalLedger& ledger);

// Orders providers by the weighted sum of min-max normalized factors,
// descending; a factor with no spread contributes the same 0.5 to everyone.
// Ties break by ascending miner id. Providers lacking the requested service
// are dropped before normalization.
Result<std::vector<MinerId>> rank_providers(
    const std::vector<ListingEntry>& entries, const FactorWeights& weights,
    const std::optional<ServiceTypeId>& service = std::nullopt);

}  // namespace mpsim
