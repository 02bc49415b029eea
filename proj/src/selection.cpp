#include "mpsim/selection.hpp"

#include "mpsim/encoding.hpp"

namespace mpsim {

RandomnessBeacon RandomnessBeacon::from_seed(std::uint64_t seed) {
  ByteWriter w;
  w.str("mpsim-beacon");
  w.u64(seed);
  return RandomnessBeacon(sha256(w.data()));
}

Result<BeaconOutput> RandomnessBeacon::eval(
    const std::vector<std::uint8_t>& input) {
  if (input.empty()) return Err::EmptyInput;
  counter_ += 1;
  BeaconOutput out;
  out.value = hmac_sha256(seed_key_, input);
  out.proof = out.value;  // verification recomputes under the shared key
  return out;
}

bool RandomnessBeacon::verify(const std::vector<std::uint8_t>& input,
                              const BeaconOutput& out) const {
  if (input.empty()) return false;
  Hash32 expect = hmac_sha256(seed_key_, input);
  return expect == out.value && expect == out.proof;
}

Result<MinerId> select_miner(const Hash32& value, const EligibleSet& eligible) {
  if (eligible.miners.empty()) return Err::NoEligibleMiners;
  double total = 0.0;
  for (const auto& m : eligible.miners) {
    if (m.reputation < 0.0 || m.reputation > 100.0)
      throw InvariantViolation("reputation outside [0, 100]");
    total += m.reputation;
  }
  if (total <= 0.0) return Err::ZeroTotalReputation;

  std::uint64_t top = read_u64_be(value.data());
  double u = static_cast<double>(top) * 0x1.0p-64;
  double target = u * total;
  double cum = 0.0;
  const EligibleMiner* last_positive = nullptr;
  for (const auto& m : eligible.miners) {
    cum += m.reputation;
    if (m.reputation > 0.0) last_positive = &m;
    if (target < cum && m.reputation > 0.0) return m.miner;
  }
  // Rounding can push target to the wheel's upper edge; the edge belongs to
  // the last nonempty interval.
  return last_positive->miner;
}

Result<MinerId> route_request(
    const GlobalLedger& ledger, const Order& order, RandomnessBeacon& beacon,
    const std::function<bool(const AccountId&)>& frozen) {
  auto qualifies = [&](const NodeInfo& node) {
    if (node.status != MinerStatus::Ready) return false;
    if (node.supported_services.count(order.service_type) == 0) return false;
    if (frozen && frozen(node.miner)) return false;
    return true;
  };

  if (order.mode == OrderMode::Charged && order.chosen_miner) {
    const NodeInfo* node = ledger.find_node(*order.chosen_miner);
    if (node == nullptr || !qualifies(*node)) return Err::NoEligibleMiners;
    return *order.chosen_miner;
  }

  EligibleSet eligible;
  for (const auto& [id, node] : ledger.nodes()) {
    if (!qualifies(node)) continue;
    eligible.miners.push_back({id, node.reputation});
  }
  if (eligible.miners.empty()) return Err::NoEligibleMiners;

  ByteWriter w;
  w.str("route");
  w.u64(order.id);
  eligible.context = w.take();
  auto out = beacon.eval(eligible.context);
  if (!out.ok()) return out.error();
  return select_miner(out.value().value, eligible);
}

}  // namespace mpsim
