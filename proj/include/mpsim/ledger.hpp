// The global ledger: canonical protocol state and every transition of the
// client and mining cycles. Single-writer; all mutations re-check the token
// conservation identity before returning. Canonical serialization fixes field
// order, sorts map keys and uses big-endian integers so independent replicas
// that applied the same operations produce bit-identical state hashes.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mpsim/crypto.hpp"
#include "mpsim/encoding.hpp"
#include "mpsim/ledger_types.hpp"
#include "mpsim/reputation.hpp"
#include "mpsim/rewards.hpp"
#include "mpsim/token_state.hpp"
#include "mpsim/types.hpp"

namespace mpsim {

class GlobalLedger;
Result<std::pair<TokenAmount, TokenAmount>> charged_payment(
    GlobalLedger& ledger, OrderId order_id, const FeePolicy& fee);

// Keyed-hash message authenticators stand in for asymmetric signatures: every
// identity gets a secret derived from the root key, and verification recomputes
// the MAC. The sign/verify surface is what a real scheme would replace.
class KeyStore {
 public:
  explicit KeyStore(const Hash32& root) : root_(root) {}

  static KeyStore from_seed(std::uint64_t seed) {
    ByteWriter w;
    w.str("mpsim-keystore");
    w.u64(seed);
    return KeyStore(sha256(w.data()));
  }

  Hash32 secret_for(const std::string& id) const {
    ByteWriter w;
    w.str("identity-key");
    w.str(id);
    return hmac_sha256(root_, w.data());
  }

  Signature sign(const std::string& id,
                 const std::vector<std::uint8_t>& msg) const {
    return hmac_sha256(secret_for(id), msg);
  }

  bool verify(const std::string& id, const std::vector<std::uint8_t>& msg,
              const Signature& sig) const {
    return sign(id, msg) == sig;
  }

 private:
  Hash32 root_;
};

// Message bytes a miner signs to claim completion of an order.
std::vector<std::uint8_t> exec_claim_bytes(OrderId order_id,
                                           const MinerId& miner);

struct LedgerConfig {
  ServiceWeightTable services = ServiceWeightTable::defaults();
  double q_ratio = 0.1;
  TokenAmount min_collateral = TokenAmount::tokens(10);
  FeePolicy fee;
  double theta = 0.1;
};

// Account that accumulates coordinator transaction fees from charged orders.
inline const AccountId kCoordinatorFeeAccount = "@coordinators";

class GlobalLedger {
 public:
  explicit GlobalLedger(LedgerConfig config, KeyStore keys);

  // Genesis issuance into a free balance. Counts toward total_minted.
  void mint_to(const AccountId& account, TokenAmount amount);

  Tick tick() const { return tick_; }
  void advance_tick(Tick now);

  // -- client cycle ---------------------------------------------------------
  Result<ServicePass> stake_tokens(const AccountId& client,
                                   const AssetKind& asset, TokenAmount amount,
                                   std::uint64_t value_usd_micro);
  Result<TokenAmount> unstake_tokens(const AccountId& client);
  Result<OrderId> put_order(const AccountId& client,
                            const ServiceTypeId& service_type, OrderMode mode,
                            TokenAmount price = TokenAmount(),
                            std::optional<MinerId> chosen_miner = std::nullopt);
  Result<TaskCycleRecord> record_allocation(OrderId order_id,
                                            const MinerId& miner_id);
  Status record_completion(OrderId order_id, const Signature& signature);
  Status rate_service(const AccountId& client, const MinerId& miner,
                      Rating rating);

  // -- mining cycle ---------------------------------------------------------
  Status register_miner(const MinerId& miner, TokenAmount collateral,
                        const std::set<ServiceTypeId>& services);
  Result<TokenAmount> unregister_miner(const MinerId& miner);
  Status set_miner_status(const MinerId& miner, MinerStatus status);

  // Cancels an accepted order that never completed; refunds the allowance
  // (uncharged) or the escrow (charged).
  Status expire_order(OrderId order_id);

  // -- epoch handling -------------------------------------------------------
  TokenAmount mint_epoch_pool(double annual_inflation,
                              std::uint32_t epochs_per_year);
  // Splits the accumulated reward pool by contribution and credits miner
  // balances; a zero-contribution epoch leaves the pool in place. Replenishes
  // every active pass to its full allowance.
  RewardEpoch distribute_rewards(std::uint64_t epoch_index);

  // -- views ----------------------------------------------------------------
  const std::map<OrderId, Order>& orders() const { return orders_; }
  const std::map<OrderId, TaskCycleRecord>& task_cycles() const { return task_cycles_; }
  const std::map<MinerId, NodeInfo>& nodes() const { return nodes_; }
  const std::map<AccountId, StakeRecord>& stakes() const { return stakes_; }
  const std::map<AccountId, ServicePass>& passes() const { return passes_; }
  const std::map<AccountId, TokenAmount>& balances() const { return balances_; }
  const TokenState& token() const { return token_; }
  const ContributionLedger& contributions() const { return contributions_; }
  const LedgerConfig& config() const { return config_; }
  const KeyStore& keys() const { return keys_; }

  const Order* find_order(OrderId id) const;
  const TaskCycleRecord* find_cycle(OrderId id) const;
  const NodeInfo* find_node(const MinerId& id) const;
  bool order_expired(OrderId id) const { return expired_orders_.count(id) != 0; }
  TokenAmount balance(const AccountId& account) const;
  std::uint64_t inflight_for_client(const AccountId& client) const;
  std::uint64_t inflight_for_miner(const MinerId& miner) const;
  bool has_completed_service(const AccountId& client, const MinerId& miner) const;

  std::vector<std::uint8_t> canonical_bytes() const;
  Hash32 state_hash() const;

 private:
  friend Result<std::pair<TokenAmount, TokenAmount>> charged_payment(
      GlobalLedger& ledger, OrderId order_id, const FeePolicy& fee);

  void recompute_reputation(NodeInfo& node);
  void check() const { token_.check_conservation(); }
  TokenAmount& balance_ref(const AccountId& account);

  LedgerConfig config_;
  KeyStore keys_;
  Tick tick_ = 0;
  OrderId next_order_id_ = 1;

  std::map<OrderId, Order> orders_;  // append-only
  std::map<OrderId, TaskCycleRecord> task_cycles_;
  std::map<MinerId, NodeInfo> nodes_;
  std::map<AccountId, StakeRecord> stakes_;
  std::map<AccountId, ServicePass> passes_;
  std::map<AccountId, TokenAmount> balances_;
  std::set<OrderId> expired_orders_;
  TokenState token_;
  ContributionLedger contributions_;

  // Derived indices; rebuilt state, not part of the canonical encoding.
  std::map<AccountId, std::uint64_t> inflight_by_client_;
  std::map<MinerId, std::uint64_t> inflight_by_miner_;
  std::set<std::pair<AccountId, MinerId>> completed_pairs_;
  std::map<std::pair<AccountId, MinerId>, OrderId> latest_completed_;
  std::set<std::pair<AccountId, MinerId>> charged_pairs_;
};

}  // namespace mpsim
