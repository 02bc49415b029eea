#include "mpsim/economics.hpp"

#include <algorithm>
#include <cmath>

namespace mpsim {

EpochOutcome advance_epoch(const TokenState& state, double annual_inflation,
                           std::uint32_t epochs_per_year,
                           const EpochFlows& flows) {
  state.check_conservation();
  TokenState next = state;
  TokenAmount pool =
      epoch_pool(next.total_minted, annual_inflation, epochs_per_year);
  next.total_minted += pool;
  next.reward_pool += pool;

  next.reward_pool -= flows.distributed;
  next.circulating += flows.distributed;
  next.locked_stakes -= flows.stake_unlocks;
  next.circulating += flows.stake_unlocks;
  next.circulating -= flows.stake_locks;
  next.locked_stakes += flows.stake_locks;
  next.check_conservation();

  std::int64_t delta = static_cast<std::int64_t>(flows.distributed.base_units()) +
                       static_cast<std::int64_t>(flows.stake_unlocks.base_units()) -
                       static_cast<std::int64_t>(flows.stake_locks.base_units());
  return EpochOutcome{next, pool, delta};
}

Result<std::pair<TokenAmount, TokenAmount>> charged_payment(
    GlobalLedger& ledger, OrderId order_id, const FeePolicy& fee) {
  auto order_it = ledger.orders_.find(order_id);
  if (order_it == ledger.orders_.end()) return Err::OrderNotFound;
  const Order& order = order_it->second;
  if (order.mode != OrderMode::Charged) return Err::NotCharged;
  auto cycle_it = ledger.task_cycles_.find(order_id);
  if (cycle_it == ledger.task_cycles_.end() ||
      !cycle_it->second.completion_sig.has_value())
    return Err::NotCompleted;
  TaskCycleRecord& cycle = cycle_it->second;
  if (cycle.value_moved != TokenAmount()) return Err::AlreadyCompleted;

  // fee = floor(price * rate), carried out in integer micro-rate.
  auto rate_micro = static_cast<std::uint64_t>(
      std::llround(fee.coordinator_fee_rate * 1e6));
  unsigned __int128 cut =
      static_cast<unsigned __int128>(order.price.base_units()) * rate_micro /
      1'000'000;
  TokenAmount fee_amount = TokenAmount::base(static_cast<std::uint64_t>(cut));
  TokenAmount miner_paid = order.price;
  miner_paid -= fee_amount;

  ledger.token_.escrowed -= order.price;
  ledger.token_.circulating += order.price;
  ledger.balance_ref(cycle.miner) += miner_paid;
  ledger.balance_ref(kCoordinatorFeeAccount) += fee_amount;
  cycle.value_moved = order.price;

  auto pair = std::make_pair(order.client, cycle.miner);
  if (ledger.charged_pairs_.insert(pair).second) {
    auto node = ledger.nodes_.find(cycle.miner);
    if (node != ledger.nodes_.end()) node->second.subscriber_count += 1;
  }
  ledger.check();
  return std::make_pair(miner_paid, fee_amount);
}

std::vector<ListingEntry> build_listing(const GlobalLedger& ledger) {
  std::vector<ListingEntry> out;
  for (const auto& [id, node] : ledger.nodes()) {
    if (node.status == MinerStatus::Unregistered) continue;
    ListingEntry e;
    e.miner = id;
    e.customer_rating = 1.0 + 4.0 * node.reputation / 100.0;
    e.subscriber_count = node.subscriber_count;
    e.tokens_staked = node.collateral;
    e.services = node.supported_services;
    out.push_back(e);
  }
  return out;
}

namespace {

struct FactorRange {
  double lo = 0.0;
  double hi = 0.0;
  double normalize(double v) const {
    if (hi <= lo) return 0.5;
    return (v - lo) / (hi - lo);
  }
};

FactorRange range_of(const std::vector<double>& values) {
  FactorRange r;
  r.lo = *std::min_element(values.begin(), values.end());
  r.hi = *std::max_element(values.begin(), values.end());
  return r;
}

}  // namespace

Result<std::vector<MinerId>> rank_providers(
    const std::vector<ListingEntry>& entries, const FactorWeights& weights,
    const std::optional<ServiceTypeId>& service) {
  if (weights.rating < 0.0 || weights.subscribers < 0.0 || weights.staked < 0.0)
    throw InvariantViolation("negative listing factor weight");
  if (weights.rating == 0.0 && weights.subscribers == 0.0 &&
      weights.staked == 0.0)
    throw InvariantViolation("all listing factor weights zero");

  std::vector<const ListingEntry*> eligible;
  for (const auto& e : entries) {
    if (service && e.services.count(*service) == 0) continue;
    eligible.push_back(&e);
  }
  if (eligible.empty()) return Err::EmptyListing;

  std::vector<double> ratings, subs, staked;
  for (const auto* e : eligible) {
    ratings.push_back(e->customer_rating);
    subs.push_back(static_cast<double>(e->subscriber_count));
    staked.push_back(static_cast<double>(e->tokens_staked.base_units()));
  }
  FactorRange rr = range_of(ratings);
  FactorRange rs = range_of(subs);
  FactorRange rk = range_of(staked);

  struct Scored {
    MinerId miner;
    double score;
  };
  std::vector<Scored> scored;
  for (const auto* e : eligible) {
    double s = weights.rating * rr.normalize(e->customer_rating) +
               weights.subscribers *
                   rs.normalize(static_cast<double>(e->subscriber_count)) +
               weights.staked *
                   rk.normalize(static_cast<double>(e->tokens_staked.base_units()));
    scored.push_back({e->miner, s});
  }
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.miner < b.miner;
  });
  std::vector<MinerId> out;
  out.reserve(scored.size());
  for (const auto& s : scored) out.push_back(s.miner);
  return out;
}

}  // namespace mpsim
