// Client and miner behavior state machines. Each actor is stepped once per
// tick with an inbox and a read-only ledger view and returns the messages it
// emits; adversarial kinds deviate only in what they emit.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mpsim/bus.hpp"
#include "mpsim/ledger.hpp"
#include "mpsim/rng.hpp"
#include "mpsim/scheduler.hpp"
#include "mpsim/types.hpp"

namespace mpsim {

enum class ActorKind : std::uint8_t {
  HonestClient,
  DeviantReviewer,
  SelfDealingPair,
  HonestMiner,
  DoSMiner,
  SybilFlooder,
};

enum class DosMode : std::uint8_t {
  Withhold,  // claims completion, never delivers the output
  Silent,    // never claims; accepted orders expire
};

struct ServiceCatalogEntry {
  Milli weight_milli = kMilliOne;
  Tick latency = 1;
};
using ServiceCatalog = std::map<ServiceTypeId, ServiceCatalogEntry>;

struct ClientParams {
  ActorKind kind = ActorKind::HonestClient;
  ServiceTypeId service;
  Tick demand_period = 5;    // one order attempt per period
  Tick demand_offset = 0;
  double p_rate = 1.0;       // chance of rating after a confirmed output
  Tick output_timeout = 50;  // measured from allocation
  OrderMode mode = OrderMode::Uncharged;
  TokenAmount price;                 // charged only
  std::optional<MinerId> chosen;     // charged only
  MinerId own_miner;                 // self-dealing: the colluding miner
};

struct ClientView {
  const GlobalLedger* ledger = nullptr;
  const ServiceCatalog* catalog = nullptr;
  const KeyStore* keys = nullptr;
  Tick now = 0;
  Tick link_delay = 0;
  bool frozen = false;
};

class ClientActor {
 public:
  ClientActor(AccountId id, ClientParams params, std::uint64_t seed)
      : id_(std::move(id)), params_(std::move(params)), rng_(seed) {}

  const AccountId& id() const { return id_; }
  const ClientParams& params() const { return params_; }

  std::vector<Message> step(const std::vector<Message>& inbox,
                            const ClientView& view);
  // The coordinator echoes accepted order ids back so the client can track
  // outcomes; rejected puts never get one.
  void order_accepted(OrderId id, Tick now);
  // Demand starts disabled for clients whose stake is scripted for a later
  // tick and stops again after a scripted unstake.
  void set_demand(bool on) { demand_on_ = on; }

 private:
  Rating honest_rating(const Message& output, const ClientView& view) const;
  Rating adjust_rating(Rating r) const;
  std::vector<Message> sweep_timeouts(const ClientView& view);

  AccountId id_;
  ClientParams params_;
  Rng rng_;
  bool demand_on_ = true;
  std::map<OrderId, Tick> awaiting_;  // accepted orders -> accepted tick
  std::set<OrderId> rated_;
};

struct MinerParams {
  ActorKind kind = ActorKind::HonestMiner;
  DosMode dos_mode = DosMode::Withhold;
  Tick extra_latency = 0;  // added service time, exercises late outputs
};

struct MinerView {
  const GlobalLedger* ledger = nullptr;
  const ServiceCatalog* catalog = nullptr;
  Tick now = 0;
  Tick link_delay = 0;
};

class MinerActor {
 public:
  MinerActor(MinerId id, MinerParams params)
      : id_(std::move(id)), params_(params) {}

  const MinerId& id() const { return id_; }
  const MinerParams& params() const { return params_; }

  void on_allocation(OrderId order, const AccountId& client,
                     const ServiceTypeId& service, Tick now);
  void drop_order(OrderId order);  // expiry cancelled it
  std::vector<Message> step(const MinerView& view, const KeyStore& keys);

  bool has_order(OrderId order) const;
  bool claimed(OrderId order) const { return claimed_.count(order) != 0; }
  std::size_t queued() const;
  bool busy() const { return batch_.has_value(); }

 private:
  friend Result<Message> miner_exec(MinerActor& actor, OrderId order,
                                    const KeyStore& keys, Tick now);
  friend Result<Message> miner_send_output(MinerActor& actor, OrderId order,
                                           Tick now, Tick link_delay);

  struct QueuedOrder {
    OrderId order = 0;
    AccountId client;
    ServiceTypeId service;
  };
  struct BatchRun {
    std::vector<OrderId> serve;
    std::size_t next = 0;
    Tick item_done_at = 0;
  };

  void open_batch(const MinerView& view);

  MinerId id_;
  MinerParams params_;
  std::vector<QueuedOrder> pending_;  // arrival order
  std::optional<BatchRun> batch_;
  std::map<OrderId, QueuedOrder> by_id_;
  std::set<OrderId> claimed_;
};

// Emits the signed completion claim for an order this miner holds.
Result<Message> miner_exec(MinerActor& actor, OrderId order,
                           const KeyStore& keys, Tick now);
// Emits the output delivery for an already claimed order.
Result<Message> miner_send_output(MinerActor& actor, OrderId order, Tick now,
                                  Tick link_delay);

}  // namespace mpsim
