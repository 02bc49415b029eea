// Replicated record types: stakes, passes, orders, task cycles and node info.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "mpsim/crypto.hpp"
#include "mpsim/types.hpp"

namespace mpsim {

// Fixed-point x1000 used for service weights, allowance metering and
// contribution accounting, so the replicated state stays integer-exact.
using Milli = std::int64_t;
constexpr Milli kMilliOne = 1000;

struct StakeRecord {
  AccountId client;
  AssetKind asset;
  TokenAmount amount;
  std::uint64_t value_usd_micro = 0;  // micro-dollars at lock time
  Tick locked_at = 0;
};

struct ServicePass {
  AccountId client;
  Milli allowance_milli = 0;  // remaining service-volume, x1000
  Milli full_allowance_milli = 0;  // replenishment target per epoch
  Tick issued_at = 0;
  bool active = false;

  std::uint64_t allowance_units() const {
    return static_cast<std::uint64_t>(allowance_milli / kMilliOne);
  }
};

enum class OrderMode : std::uint8_t { Uncharged, Charged };

struct Order {
  OrderId id = 0;
  AccountId client;
  ServiceTypeId service_type;
  OrderMode mode = OrderMode::Uncharged;
  TokenAmount price;                    // Charged only, > 0
  std::optional<MinerId> chosen_miner;  // Charged only, client's pick
  Tick submitted_at = 0;
};

struct TaskCycleRecord {
  OrderId order = 0;
  MinerId miner;
  Tick allocated_at = 0;
  std::optional<Signature> completion_sig;
  std::optional<Rating> rating;
  TokenAmount value_moved;
};

enum class MinerStatus : std::uint8_t { Ready, Busy, Unregistered };

struct NodeInfo {
  MinerId miner;
  TokenAmount collateral;
  MinerStatus status = MinerStatus::Unregistered;
  std::set<ServiceTypeId> supported_services;
  std::map<AccountId, Rating> latest_ratings;  // one per client, latest wins
  double reputation = 50.0;  // always reputation_score(latest_ratings, theta)
  Milli contribution_milli = 0;  // current-epoch weighted completions, x1000
  std::uint64_t subscriber_count = 0;  // distinct charged-service clients
};

}  // namespace mpsim
