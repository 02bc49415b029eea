// Contribution accounting and the inflation-funded reward split.
//
// Contribution is the service-weighted count of completed uncharged requests
// per miner per epoch. The epoch pool is minted as a linear pro-ration of the
// annual inflation rate, then divided proportionally to contribution using
// largest-remainder apportionment so the allocations sum to the pool exactly.

#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "mpsim/ledger_types.hpp"
#include "mpsim/types.hpp"

namespace mpsim {

struct ServiceWeightTable {
  // weight x1000; text 1.000 and image 4.000 by default, DAO-exogenous updates
  // only at epoch boundaries.
  std::map<ServiceTypeId, Milli> weights_milli;

  static ServiceWeightTable defaults() {
    ServiceWeightTable t;
    t.weights_milli["text"] = 1 * kMilliOne;
    t.weights_milli["image"] = 4 * kMilliOne;
    return t;
  }

  bool contains(const ServiceTypeId& id) const {
    return weights_milli.count(id) != 0;
  }
  Milli weight_milli(const ServiceTypeId& id) const {
    return weights_milli.at(id);
  }
};

struct ContributionLedger {
  std::map<MinerId, Milli> contribution_milli;
  Tick epoch_start = 0;
  std::optional<Tick> epoch_end;
};

struct RewardEpoch {
  TokenAmount pool;
  std::map<MinerId, TokenAmount> allocations;  // sums to pool exactly
  std::uint64_t epoch_index = 0;
};

Status record_contribution(ContributionLedger& cl, const MinerId& miner,
                           const ServiceTypeId& service_type,
                           std::uint64_t count,
                           const ServiceWeightTable& weights);

// floor(total_supply * annual_inflation / epochs_per_year); the inflation rate
// is carried in micro (1e-6) resolution.
TokenAmount epoch_pool(TokenAmount total_supply, double annual_inflation,
                       std::uint32_t epochs_per_year);

// Largest-remainder apportionment of pool by contribution share, remainder
// ties broken by ascending MinerId. A zero-contribution epoch allocates
// nothing; the caller rolls the pool into the next epoch. Resets the
// contribution ledger.
RewardEpoch distribute(ContributionLedger& cl, TokenAmount pool,
                       std::uint64_t epoch_index);

// Service-volume units granted per locked stake: one unit per staked dollar
// for the native asset, q units per dollar otherwise (floored at unit
// granularity). q is carried in milli (1e-3) resolution.
std::uint64_t service_volume_allowance(std::uint64_t value_usd_micro,
                                       const AssetKind& asset, double q);

}  // namespace mpsim
