#include "mpsim/ledger.hpp"

#include "mpsim/scheduler.hpp"

#include <cmath>

namespace mpsim {

std::vector<std::uint8_t> exec_claim_bytes(OrderId order_id,
                                           const MinerId& miner) {
  ByteWriter w;
  w.str("exec-claim");
  w.u64(order_id);
  w.str(miner);
  return w.take();
}

GlobalLedger::GlobalLedger(LedgerConfig config, KeyStore keys)
    : config_(std::move(config)), keys_(std::move(keys)) {
  if (config_.q_ratio <= 0.0 || config_.q_ratio > 1.0)
    throw InvariantViolation("q_ratio outside (0, 1]");
  if (config_.theta <= 0.0) throw InvariantViolation("theta must be positive");
}

void GlobalLedger::mint_to(const AccountId& account, TokenAmount amount) {
  token_.total_minted += amount;
  token_.circulating += amount;
  balance_ref(account) += amount;
  check();
}

void GlobalLedger::advance_tick(Tick now) {
  if (now < tick_) throw InvariantViolation("ledger tick moved backwards");
  tick_ = now;
}

TokenAmount& GlobalLedger::balance_ref(const AccountId& account) {
  return balances_[account];
}

TokenAmount GlobalLedger::balance(const AccountId& account) const {
  auto it = balances_.find(account);
  return it == balances_.end() ? TokenAmount() : it->second;
}

std::uint64_t GlobalLedger::inflight_for_client(const AccountId& client) const {
  auto it = inflight_by_client_.find(client);
  return it == inflight_by_client_.end() ? 0 : it->second;
}

std::uint64_t GlobalLedger::inflight_for_miner(const MinerId& miner) const {
  auto it = inflight_by_miner_.find(miner);
  return it == inflight_by_miner_.end() ? 0 : it->second;
}

bool GlobalLedger::has_completed_service(const AccountId& client,
                                         const MinerId& miner) const {
  return completed_pairs_.count({client, miner}) != 0;
}

const Order* GlobalLedger::find_order(OrderId id) const {
  auto it = orders_.find(id);
  return it == orders_.end() ? nullptr : &it->second;
}

const TaskCycleRecord* GlobalLedger::find_cycle(OrderId id) const {
  auto it = task_cycles_.find(id);
  return it == task_cycles_.end() ? nullptr : &it->second;
}

const NodeInfo* GlobalLedger::find_node(const MinerId& id) const {
  auto it = nodes_.find(id);
  return it == nodes_.end() ? nullptr : &it->second;
}

Result<ServicePass> GlobalLedger::stake_tokens(const AccountId& client,
                                               const AssetKind& asset,
                                               TokenAmount amount,
                                               std::uint64_t value_usd_micro) {
  if (amount == TokenAmount()) return Err::ZeroStake;
  if (passes_.count(client) != 0) return Err::PassAlreadyActive;
  if (asset.is_native()) {
    if (balance(client) < amount) return Err::InsufficientBalance;
    balance_ref(client) -= amount;
    token_.circulating -= amount;
    token_.locked_stakes += amount;
  }
  // External-asset stakes are locked on their home chain; only the appraised
  // value enters this ledger.
  std::uint64_t allowance =
      service_volume_allowance(value_usd_micro, asset, config_.q_ratio);

  stakes_[client] =
      StakeRecord{client, asset, amount, value_usd_micro, tick_};
  ServicePass pass;
  pass.client = client;
  pass.full_allowance_milli = static_cast<Milli>(allowance) * kMilliOne;
  pass.allowance_milli = pass.full_allowance_milli;
  pass.issued_at = tick_;
  pass.active = true;
  passes_[client] = pass;
  check();
  return pass;
}

Result<TokenAmount> GlobalLedger::unstake_tokens(const AccountId& client) {
  auto it = passes_.find(client);
  if (it == passes_.end()) return Err::NoActivePass;
  if (inflight_for_client(client) != 0) return Err::InFlightOrders;
  StakeRecord rec = stakes_.at(client);
  if (rec.asset.is_native()) {
    token_.locked_stakes -= rec.amount;
    token_.circulating += rec.amount;
    balance_ref(client) += rec.amount;
  }
  stakes_.erase(client);
  passes_.erase(it);
  check();
  return rec.amount;
}

Result<OrderId> GlobalLedger::put_order(const AccountId& client,
                                        const ServiceTypeId& service_type,
                                        OrderMode mode, TokenAmount price,
                                        std::optional<MinerId> chosen_miner) {
  if (!config_.services.contains(service_type)) return Err::UnknownServiceType;
  if (mode == OrderMode::Uncharged) {
    auto it = passes_.find(client);
    if (it == passes_.end() || !it->second.active)
      return Err::InvalidServicePass;
    Milli cost = config_.services.weight_milli(service_type);
    if (it->second.allowance_milli < cost) return Err::InsufficientAllowance;
    it->second.allowance_milli -= cost;
  } else {
    if (price == TokenAmount()) return Err::ZeroPrice;
    if (balance(client) < price) return Err::InsufficientBalance;
    balance_ref(client) -= price;
    token_.circulating -= price;
    token_.escrowed += price;
  }

  OrderId id = next_order_id_++;
  Order order;
  order.id = id;
  order.client = client;
  order.service_type = service_type;
  order.mode = mode;
  order.price = mode == OrderMode::Charged ? price : TokenAmount();
  order.chosen_miner = mode == OrderMode::Charged ? chosen_miner : std::nullopt;
  order.submitted_at = tick_;
  orders_[id] = order;
  check();
  return id;
}

Result<TaskCycleRecord> GlobalLedger::record_allocation(
    OrderId order_id, const MinerId& miner_id) {
  auto it = orders_.find(order_id);
  if (it == orders_.end()) return Err::OrderNotFound;
  if (expired_orders_.count(order_id) != 0) return Err::OrderExpired;
  if (task_cycles_.count(order_id) != 0) return Err::AlreadyAllocated;
  auto node = nodes_.find(miner_id);
  if (node == nodes_.end() || node->second.status != MinerStatus::Ready)
    return Err::MinerUnavailable;
  if (node->second.supported_services.count(it->second.service_type) == 0)
    return Err::MinerUnavailable;

  TaskCycleRecord rec;
  rec.order = order_id;
  rec.miner = miner_id;
  rec.allocated_at = tick_;
  task_cycles_[order_id] = rec;
  inflight_by_client_[it->second.client] += 1;
  inflight_by_miner_[miner_id] += 1;
  return rec;
}

Status GlobalLedger::record_completion(OrderId order_id,
                                       const Signature& signature) {
  auto order_it = orders_.find(order_id);
  if (order_it == orders_.end()) return Err::OrderNotFound;
  auto it = task_cycles_.find(order_id);
  if (it == task_cycles_.end()) return Err::NotAllocated;
  TaskCycleRecord& rec = it->second;
  if (rec.completion_sig.has_value()) return Err::AlreadyCompleted;
  if (!keys_.verify(rec.miner, exec_claim_bytes(order_id, rec.miner),
                    signature))
    return Err::BadSignature;

  rec.completion_sig = signature;
  const Order& order = order_it->second;
  if (order.mode == OrderMode::Uncharged) {
    record_contribution(contributions_, rec.miner, order.service_type, 1,
                        config_.services);
    auto node = nodes_.find(rec.miner);
    if (node != nodes_.end())
      node->second.contribution_milli +=
          config_.services.weight_milli(order.service_type);
  }
  auto key = std::make_pair(order.client, rec.miner);
  completed_pairs_.insert(key);
  latest_completed_[key] = order_id;

  auto& cl = inflight_by_client_[order.client];
  auto& mn = inflight_by_miner_[rec.miner];
  if (cl == 0 || mn == 0)
    throw InvariantViolation("in-flight counters underflow on completion");
  cl -= 1;
  mn -= 1;
  check();
  return Status::ok_status();
}

Status GlobalLedger::rate_service(const AccountId& client,
                                  const MinerId& miner, Rating rating) {
  auto node = nodes_.find(miner);
  if (node == nodes_.end()) return Err::UnknownMiner;
  auto latest = latest_completed_.find({client, miner});
  if (latest == latest_completed_.end()) return Err::NoCompletedService;
  node->second.latest_ratings[client] = rating;
  recompute_reputation(node->second);
  task_cycles_.at(latest->second).rating = rating;
  return Status::ok_status();
}

void GlobalLedger::recompute_reputation(NodeInfo& node) {
  node.reputation = reputation_score(node.latest_ratings, config_.theta);
}

Status GlobalLedger::register_miner(const MinerId& miner,
                                    TokenAmount collateral,
                                    const std::set<ServiceTypeId>& services) {
  auto it = nodes_.find(miner);
  if (it != nodes_.end() && it->second.status != MinerStatus::Unregistered)
    return Err::AlreadyRegistered;
  if (collateral < config_.min_collateral) return Err::CollateralTooLow;
  for (const auto& s : services)
    if (!config_.services.contains(s)) return Err::UnknownServiceType;
  if (balance(miner) < collateral) return Err::InsufficientBalance;

  balance_ref(miner) -= collateral;
  token_.circulating -= collateral;
  token_.locked_collateral += collateral;

  NodeInfo node;
  if (it != nodes_.end()) node = it->second;  // rejoining keeps its history
  node.miner = miner;
  node.collateral = collateral;
  node.status = MinerStatus::Ready;
  node.supported_services = services;
  recompute_reputation(node);
  nodes_[miner] = node;
  check();
  return Status::ok_status();
}

Result<TokenAmount> GlobalLedger::unregister_miner(const MinerId& miner) {
  auto it = nodes_.find(miner);
  if (it == nodes_.end() || it->second.status == MinerStatus::Unregistered)
    return Err::UnknownMiner;
  if (inflight_for_miner(miner) != 0) return Err::InFlightWork;
  TokenAmount collateral = it->second.collateral;
  token_.locked_collateral -= collateral;
  token_.circulating += collateral;
  balance_ref(miner) += collateral;
  it->second.collateral = TokenAmount();
  it->second.status = MinerStatus::Unregistered;
  check();
  return collateral;
}

Status GlobalLedger::set_miner_status(const MinerId& miner,
                                      MinerStatus status) {
  auto it = nodes_.find(miner);
  if (it == nodes_.end()) return Err::UnknownMiner;
  return set_status(it->second, status);
}

Status GlobalLedger::expire_order(OrderId order_id) {
  auto order_it = orders_.find(order_id);
  if (order_it == orders_.end()) return Err::OrderNotFound;
  if (expired_orders_.count(order_id) != 0) return Err::OrderExpired;
  const Order& order = order_it->second;
  auto cycle = task_cycles_.find(order_id);
  if (cycle != task_cycles_.end()) {
    if (cycle->second.completion_sig.has_value()) return Err::AlreadyCompleted;
    auto& cl = inflight_by_client_[order.client];
    auto& mn = inflight_by_miner_[cycle->second.miner];
    if (cl == 0 || mn == 0)
      throw InvariantViolation("in-flight counters underflow on expiry");
    cl -= 1;
    mn -= 1;
    task_cycles_.erase(cycle);
  }

  if (order.mode == OrderMode::Uncharged) {
    auto pass = passes_.find(order.client);
    if (pass != passes_.end() && pass->second.active) {
      Milli weight = config_.services.weight_milli(order.service_type);
      Milli replenished = pass->second.allowance_milli + weight;
      pass->second.allowance_milli =
          std::min(replenished, pass->second.full_allowance_milli);
    }
  } else {
    token_.escrowed -= order.price;
    token_.circulating += order.price;
    balance_ref(order.client) += order.price;
  }
  expired_orders_.insert(order_id);
  check();
  return Status::ok_status();
}

TokenAmount GlobalLedger::mint_epoch_pool(double annual_inflation,
                                          std::uint32_t epochs_per_year) {
  TokenAmount pool =
      epoch_pool(token_.total_minted, annual_inflation, epochs_per_year);
  token_.total_minted += pool;
  token_.reward_pool += pool;
  check();
  return pool;
}

RewardEpoch GlobalLedger::distribute_rewards(std::uint64_t epoch_index) {
  RewardEpoch ep = distribute(contributions_, token_.reward_pool, epoch_index);
  for (const auto& [miner, amount] : ep.allocations) {
    token_.reward_pool -= amount;
    token_.circulating += amount;
    balance_ref(miner) += amount;
  }
  for (auto& [client, pass] : passes_) {
    (void)client;
    if (pass.active) pass.allowance_milli = pass.full_allowance_milli;
  }
  for (auto& [id, node] : nodes_) {
    (void)id;
    node.contribution_milli = 0;
  }
  contributions_.epoch_start = tick_;
  check();
  return ep;
}

// Layout, in declaration order; every variable-length field carries a length
// prefix and map entries are emitted in key order.
std::vector<std::uint8_t> GlobalLedger::canonical_bytes() const {
  ByteWriter w;
  w.u8(1);  // encoding version
  w.u64(tick_);
  w.u64(next_order_id_);

  w.u64(token_.total_minted.base_units());
  w.u64(token_.circulating.base_units());
  w.u64(token_.locked_stakes.base_units());
  w.u64(token_.locked_collateral.base_units());
  w.u64(token_.escrowed.base_units());
  w.u64(token_.reward_pool.base_units());

  w.u32(static_cast<std::uint32_t>(orders_.size()));
  for (const auto& [id, o] : orders_) {
    w.u64(id);
    w.str(o.client);
    w.str(o.service_type);
    w.u8(o.mode == OrderMode::Charged ? 1 : 0);
    w.token(o.price);
    w.u8(o.chosen_miner.has_value() ? 1 : 0);
    if (o.chosen_miner) w.str(*o.chosen_miner);
    w.u64(o.submitted_at);
  }

  w.u32(static_cast<std::uint32_t>(expired_orders_.size()));
  for (OrderId id : expired_orders_) w.u64(id);

  w.u32(static_cast<std::uint32_t>(task_cycles_.size()));
  for (const auto& [id, rec] : task_cycles_) {
    w.u64(id);
    w.str(rec.miner);
    w.u64(rec.allocated_at);
    w.u8(rec.completion_sig.has_value() ? 1 : 0);
    if (rec.completion_sig) w.hash(*rec.completion_sig);
    w.u8(rec.rating.has_value() ? 1 : 0);
    if (rec.rating) w.u8(static_cast<std::uint8_t>(*rec.rating));
    w.token(rec.value_moved);
  }

  w.u32(static_cast<std::uint32_t>(nodes_.size()));
  for (const auto& [id, node] : nodes_) {
    w.str(id);
    w.token(node.collateral);
    w.u8(static_cast<std::uint8_t>(node.status));
    w.u32(static_cast<std::uint32_t>(node.supported_services.size()));
    for (const auto& s : node.supported_services) w.str(s);
    w.u32(static_cast<std::uint32_t>(node.latest_ratings.size()));
    for (const auto& [client, rating] : node.latest_ratings) {
      w.str(client);
      w.u8(static_cast<std::uint8_t>(rating));
    }
    // Reputation is a deterministic double; quantized so the encoding never
    // depends on printf formatting.
    w.i64(std::llround(node.reputation * 1e12));
    w.i64(node.contribution_milli);
    w.u64(node.subscriber_count);
  }

  w.u32(static_cast<std::uint32_t>(stakes_.size()));
  for (const auto& [client, rec] : stakes_) {
    w.str(client);
    w.u8(rec.asset.is_native() ? 0 : 1);
    w.str(rec.asset.symbol);
    w.token(rec.amount);
    w.u64(rec.value_usd_micro);
    w.u64(rec.locked_at);
  }

  w.u32(static_cast<std::uint32_t>(passes_.size()));
  for (const auto& [client, pass] : passes_) {
    w.str(client);
    w.i64(pass.allowance_milli);
    w.i64(pass.full_allowance_milli);
    w.u64(pass.issued_at);
    w.u8(pass.active ? 1 : 0);
  }

  w.u32(static_cast<std::uint32_t>(balances_.size()));
  for (const auto& [account, amount] : balances_) {
    w.str(account);
    w.token(amount);
  }

  w.u32(static_cast<std::uint32_t>(contributions_.contribution_milli.size()));
  for (const auto& [miner, milli] : contributions_.contribution_milli) {
    w.str(miner);
    w.i64(milli);
  }
  w.u64(contributions_.epoch_start);
  return w.take();
}

Hash32 GlobalLedger::state_hash() const { return sha256(canonical_bytes()); }

}  // namespace mpsim
