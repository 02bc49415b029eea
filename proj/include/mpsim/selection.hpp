// Reputation-weighted random routing. A keyed-hash beacon stands in for a
// real VRF behind the same eval/verify surface; selection maps the beacon
// value onto the cumulative-reputation wheel.

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "mpsim/crypto.hpp"
#include "mpsim/ledger.hpp"
#include "mpsim/types.hpp"

namespace mpsim {

struct BeaconOutput {
  Hash32 value{};
  Hash32 proof{};
};

class RandomnessBeacon {
 public:
  explicit RandomnessBeacon(const Hash32& seed_key) : seed_key_(seed_key) {}

  static RandomnessBeacon from_seed(std::uint64_t seed);

  Result<BeaconOutput> eval(const std::vector<std::uint8_t>& input);
  bool verify(const std::vector<std::uint8_t>& input,
              const BeaconOutput& out) const;
  std::uint64_t counter() const { return counter_; }

 private:
  Hash32 seed_key_;
  std::uint64_t counter_ = 0;
};

struct EligibleMiner {
  MinerId miner;
  double reputation = 0.0;  // [0, 100]
};

struct EligibleSet {
  std::vector<EligibleMiner> miners;
  std::vector<std::uint8_t> context;
};

// Roulette wheel over reputations: the top 64 bits of `value` give
// u in [0,1); the winner owns the cumulative interval containing u * sum(r).
// A zero-reputation miner owns an empty interval and is never picked.
Result<MinerId> select_miner(const Hash32& value, const EligibleSet& eligible);

// Ready, supports the service, and not under a threshold freeze. Charged
// orders naming a provider get that provider iff it qualifies.
Result<MinerId> route_request(
    const GlobalLedger& ledger, const Order& order, RandomnessBeacon& beacon,
    const std::function<bool(const AccountId&)>& frozen = nullptr);

}  // namespace mpsim
