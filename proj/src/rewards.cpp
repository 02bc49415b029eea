#include "mpsim/rewards.hpp"

#include <algorithm>
#include <cmath>

namespace mpsim {

namespace {
using u128 = unsigned __int128;
}

Status record_contribution(ContributionLedger& cl, const MinerId& miner,
                           const ServiceTypeId& service_type,
                           std::uint64_t count,
                           const ServiceWeightTable& weights) {
  if (!weights.contains(service_type)) return Err::UnknownServiceType;
  if (count == 0) return Status();
  Milli add = static_cast<Milli>(count) * weights.weight_milli(service_type);
  cl.contribution_milli[miner] += add;
  return Status();
}

TokenAmount epoch_pool(TokenAmount total_supply, double annual_inflation,
                       std::uint32_t epochs_per_year) {
  if (epochs_per_year == 0) throw InvariantViolation("epochs_per_year == 0");
  if (annual_inflation < 0) throw InvariantViolation("negative inflation");
  std::uint64_t inflation_micro =
      static_cast<std::uint64_t>(std::llround(annual_inflation * 1e6));
  u128 minted = static_cast<u128>(total_supply.base_units()) * inflation_micro /
                (static_cast<u128>(1'000'000) * epochs_per_year);
  return TokenAmount::base(static_cast<std::uint64_t>(minted));
}

RewardEpoch distribute(ContributionLedger& cl, TokenAmount pool,
                       std::uint64_t epoch_index) {
  RewardEpoch epoch;
  epoch.epoch_index = epoch_index;

  u128 c_total = 0;
  for (const auto& [miner, c] : cl.contribution_milli) {
    if (c < 0) throw InvariantViolation("negative contribution");
    c_total += static_cast<u128>(c);
  }

  if (c_total == 0 || pool.is_zero()) {
    // Nothing to split; pool stays with the caller for the next epoch.
    epoch.pool = TokenAmount::base(0);
    cl.contribution_milli.clear();
    return epoch;
  }

  epoch.pool = pool;

  struct Share {
    MinerId miner;
    std::uint64_t floor_alloc;
    u128 remainder;
  };
  std::vector<Share> shares;
  shares.reserve(cl.contribution_milli.size());

  std::uint64_t assigned = 0;
  for (const auto& [miner, c] : cl.contribution_milli) {
    u128 product = static_cast<u128>(pool.base_units()) * static_cast<u128>(c);
    std::uint64_t floor_alloc = static_cast<std::uint64_t>(product / c_total);
    shares.push_back({miner, floor_alloc, product % c_total});
    assigned += floor_alloc;
  }

  std::uint64_t leftover = pool.base_units() - assigned;
  if (leftover >= shares.size())
    throw InvariantViolation("apportionment leftover exceeds share count");
  std::sort(shares.begin(), shares.end(), [](const Share& a, const Share& b) {
    if (a.remainder != b.remainder) return a.remainder > b.remainder;
    return a.miner < b.miner;
  });
  for (std::uint64_t i = 0; i < leftover; ++i) shares[i].floor_alloc += 1;

  for (const Share& s : shares)
    epoch.allocations[s.miner] = TokenAmount::base(s.floor_alloc);

  cl.contribution_milli.clear();
  return epoch;
}

std::uint64_t service_volume_allowance(std::uint64_t value_usd_micro,
                                       const AssetKind& asset, double q) {
  if (asset.is_native()) return value_usd_micro / 1'000'000;
  if (q <= 0.0 || q > 1.0) throw InvariantViolation("q outside (0, 1]");
  std::uint64_t q_milli = static_cast<std::uint64_t>(std::llround(q * 1000.0));
  u128 units = static_cast<u128>(value_usd_micro) * q_milli /
               static_cast<u128>(1'000'000'000);
  return static_cast<std::uint64_t>(units);
}

}  // namespace mpsim
