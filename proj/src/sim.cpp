#include "mpsim/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "mpsim/actors.hpp"
#include "mpsim/bus.hpp"
#include "mpsim/coordination.hpp"
#include "mpsim/economics.hpp"
#include "mpsim/ledger.hpp"
#include "mpsim/reputation.hpp"
#include "mpsim/rng.hpp"
#include "mpsim/selection.hpp"

namespace mpsim {
namespace {

std::uint64_t id_salt(const std::string& id) {
  Hash32 h = sha256(id);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | h[static_cast<std::size_t>(i)];
  return v;
}

TokenAmount amount_of(double tokens) {
  return TokenAmount::base(static_cast<std::uint64_t>(
      std::llround(tokens * static_cast<double>(TokenAmount::kBasePerToken))));
}

std::int64_t rep_q12(double reputation) {
  return std::llround(reputation * 1e12);
}

// Largest accepted-order count inside any sliding window (end - window, end].
std::uint32_t max_in_window(const std::vector<Tick>& at, Tick window) {
  std::uint32_t best = 0;
  std::size_t lo = 0;
  for (std::size_t hi = 0; hi < at.size(); ++hi) {
    while (at[hi] - at[lo] >= window) ++lo;
    best = std::max(best, static_cast<std::uint32_t>(hi - lo + 1));
  }
  return best;
}

struct ScriptedStake {
  AccountId client;
  AssetKind asset = AssetKind::native();
  TokenAmount amount;
  std::uint64_t value_usd_micro = 0;
  Tick at = 0;
  bool done = false;
};

struct ScriptedUnstake {
  AccountId client;
  Tick at = 0;
  bool native = false;
  bool done = false;
};

class Simulation {
 public:
  explicit Simulation(const ScenarioConfig& cfg)
      : cfg_(cfg),
        catalog_(catalog_of(cfg)),
        keys_(KeyStore::from_seed(cfg.seed)),
        ledger_(ledger_config_of(cfg), keys_),
        beacon_(RandomnessBeacon::from_seed(cfg.seed)) {}

  SimResult run();

 private:
  static LedgerConfig ledger_config_of(const ScenarioConfig& cfg) {
    LedgerConfig lc;
    lc.services.weights_milli.clear();
    for (const auto& s : cfg.services)
      lc.services.weights_milli[s.id] =
          static_cast<Milli>(std::llround(s.weight * kMilliOne));
    lc.q_ratio = cfg.q_ratio;
    lc.min_collateral = amount_of(cfg.min_collateral_tokens);
    lc.fee.coordinator_fee_rate = cfg.fee_rate;
    lc.theta = cfg.reputation.theta;
    return lc;
  }

  void genesis();
  void scripted_stakes(Tick t);
  void expiry_sweep(Tick t);
  void retry_routing(Tick t);
  void deliver(Tick t);
  void client_phase(Tick t);
  void process_client_message(ClientActor& actor, const Message& m, Tick t);
  void allocate_order(OrderId order_id, Tick t, bool first_attempt);
  void deviant_check(const AccountId& client, const MinerId& miner,
                     Rating rating, Tick t);
  void miner_phase(Tick t);
  void process_claim(const Message& m, Tick t);
  void epoch_boundary(Tick t);
  void finish();

  void note_emitted(const Message& m) {
    report_.emitted[msg_kind_name(m.kind)] += 1;
  }
  void note_processed(const Message& m) {
    report_.processed[msg_kind_name(m.kind)] += 1;
  }
  void note_dropped(const Message& m) {
    report_.dropped[msg_kind_name(m.kind)] += 1;
  }

  const ScenarioConfig& cfg_;
  ServiceCatalog catalog_;
  KeyStore keys_;
  GlobalLedger ledger_;
  RandomnessBeacon beacon_;
  CoordinatorSet coordinators_;
  std::uint64_t last_committed_ = 0;
  ThresholdTracker tracker_;

  std::map<AccountId, ClientActor> clients_;
  std::map<MinerId, MinerActor> miners_;
  std::set<std::string> adversary_set_;
  std::set<MinerId> adversary_miners_;
  std::set<AccountId> flooder_clients_;

  std::vector<ScriptedStake> stakes_due_;
  std::vector<ScriptedUnstake> unstakes_due_;

  std::map<Tick, std::vector<Message>> scheduled_;
  std::map<AccountId, std::vector<Message>> inbox_;
  std::vector<std::pair<OrderId, Tick>> submit_log_;
  std::size_t expiry_cursor_ = 0;
  std::deque<OrderId> unrouted_;

  std::map<AccountId, std::optional<RestrictionState>> restrictions_;
  std::map<AccountId, std::vector<DeviationSample>> deviation_history_;

  long double adv_expect_sum_ = 0.0L;
  std::uint64_t adv_expect_n_ = 0;
  std::vector<Tick> flooder_accepts_;
  std::uint64_t epoch_locks_ = 0;
  std::uint64_t epoch_unlocks_ = 0;
  std::uint64_t circulating_prev_ = 0;

  MetricsReport report_;
  std::uint64_t seq_ = 0;
};

void Simulation::genesis() {
  if (cfg_.genesis_supply_tokens > 0)
    ledger_.mint_to("@treasury", amount_of(cfg_.genesis_supply_tokens));

  for (std::uint32_t i = 0; i < cfg_.coordinator_count; ++i)
    coordinators_.members.push_back(
        {"coord" + std::to_string(i), amount_of(cfg_.coordinator_stake_tokens)});
  coordinators_.m = cfg_.coordinator_threshold;
  coordinators_.validate();

  for (const auto& g : cfg_.miners) {
    for (std::uint32_t i = 0; i < g.count; ++i) {
      MinerId id = g.prefix + std::to_string(i);
      TokenAmount collateral = amount_of(g.collateral_tokens);
      ledger_.mint_to(id, collateral + amount_of(g.balance_tokens));
      std::set<ServiceTypeId> services(g.services.begin(), g.services.end());
      Status st = ledger_.register_miner(id, collateral, services);
      if (!st.ok())
        throw InvariantViolation("genesis miner registration failed: " + id);
      MinerParams mp;
      mp.kind = g.kind;
      mp.dos_mode = g.dos_mode;
      mp.extra_latency = g.extra_latency;
      miners_.emplace(id, MinerActor(id, mp));
      if (g.kind != ActorKind::HonestMiner) {
        adversary_set_.insert(id);
        adversary_miners_.insert(id);
      }
    }
  }

  for (const auto& g : cfg_.clients) {
    for (std::uint32_t i = 0; i < g.count; ++i) {
      AccountId id = g.prefix + std::to_string(i);
      ClientParams cp;
      cp.kind = g.kind;
      cp.service = g.service;
      cp.demand_period = std::max<Tick>(g.demand_period, 1);
      cp.demand_offset = i % cp.demand_period;
      cp.p_rate = g.p_rate;
      cp.output_timeout = g.output_timeout;
      cp.mode = g.order_mode;
      cp.price = amount_of(g.price_tokens);
      cp.chosen = g.chosen;
      cp.own_miner = g.own_miner;
      ClientActor actor(id, cp, derive_seed(cfg_.seed, id_salt(id)));

      bool native = g.asset == "native";
      AssetKind asset = native ? AssetKind::native() : AssetKind::external(g.asset);
      TokenAmount mint = amount_of(g.balance_tokens);
      if (g.stakes && native) mint = mint + amount_of(g.stake_tokens);
      if (!mint.is_zero()) ledger_.mint_to(id, mint);

      if (g.stakes) {
        std::uint64_t usd =
            static_cast<std::uint64_t>(std::llround(g.stake_usd * 1e6));
        if (!g.stake_at.has_value() || *g.stake_at == 0) {
          auto r = ledger_.stake_tokens(id, asset, amount_of(g.stake_tokens), usd);
          if (!r.ok())
            throw InvariantViolation("genesis stake rejected: " + id);
        } else {
          actor.set_demand(false);
          stakes_due_.push_back(
              {id, asset, amount_of(g.stake_tokens), usd, *g.stake_at, false});
        }
        if (g.unstake_at.has_value())
          unstakes_due_.push_back({id, *g.unstake_at, native, false});
      }
      clients_.emplace(id, std::move(actor));
      if (g.kind == ActorKind::DeviantReviewer ||
          g.kind == ActorKind::SelfDealingPair ||
          g.kind == ActorKind::SybilFlooder)
        adversary_set_.insert(id);
      if (g.kind == ActorKind::SybilFlooder) flooder_clients_.insert(id);
    }
  }
}

void Simulation::scripted_stakes(Tick t) {
  for (auto& s : stakes_due_) {
    if (s.done || s.at != t) continue;
    auto r = ledger_.stake_tokens(s.client, s.asset, s.amount, s.value_usd_micro);
    if (!r.ok())
      throw InvariantViolation("scripted stake rejected: " + s.client);
    if (s.asset.is_native()) epoch_locks_ += s.amount.base_units();
    clients_.at(s.client).set_demand(true);
    s.done = true;
  }
  for (auto& u : unstakes_due_) {
    if (u.done || t < u.at) continue;
    // Demand stops at the scripted tick; the release itself waits for
    // in-flight work to drain.
    clients_.at(u.client).set_demand(false);
    auto r = ledger_.unstake_tokens(u.client);
    if (!r.ok()) {
      if (r.error() == Err::InFlightOrders) continue;
      throw InvariantViolation("scripted unstake rejected: " + u.client);
    }
    if (u.native) epoch_unlocks_ += r.value().base_units();
    u.done = true;
  }
}

void Simulation::expiry_sweep(Tick t) {
  while (expiry_cursor_ < submit_log_.size()) {
    auto [oid, submitted] = submit_log_[expiry_cursor_];
    if (t < submitted + cfg_.expiry_ticks) break;
    ++expiry_cursor_;
    const TaskCycleRecord* cycle = ledger_.find_cycle(oid);
    if (cycle != nullptr && cycle->completion_sig.has_value()) continue;
    MinerId holder = cycle != nullptr ? cycle->miner : MinerId{};
    Status st = ledger_.expire_order(oid);
    if (!st.ok()) continue;
    report_.orders_expired += 1;
    if (!holder.empty()) {
      auto it = miners_.find(holder);
      if (it != miners_.end()) it->second.drop_order(oid);
    }
  }
}

void Simulation::retry_routing(Tick t) {
  if (unrouted_.empty()) return;
  bool any_ready = false;
  for (const auto& [mid, node] : ledger_.nodes())
    if (node.status == MinerStatus::Ready) {
      any_ready = true;
      break;
    }
  if (!any_ready) return;
  std::size_t n = unrouted_.size();
  for (std::size_t i = 0; i < n; ++i) {
    OrderId oid = unrouted_.front();
    unrouted_.pop_front();
    if (ledger_.order_expired(oid)) continue;
    if (ledger_.find_cycle(oid) != nullptr) continue;
    if (ledger_.find_order(oid) == nullptr) continue;
    allocate_order(oid, t, false);
  }
}

void Simulation::deliver(Tick t) {
  auto it = scheduled_.find(t);
  if (it == scheduled_.end()) return;
  for (auto& m : it->second) {
    auto client = clients_.find(m.client);
    if (client == clients_.end()) {
      note_dropped(m);
      continue;
    }
    note_processed(m);
    inbox_[m.client].push_back(std::move(m));
  }
  scheduled_.erase(it);
}

void Simulation::client_phase(Tick t) {
  for (auto& [id, actor] : clients_) {
    ClientView view;
    view.ledger = &ledger_;
    view.catalog = &catalog_;
    view.keys = &keys_;
    view.now = t;
    view.link_delay = cfg_.link_delay;
    view.frozen = tracker_.frozen(id, t);
    std::vector<Message> inbox;
    auto ib = inbox_.find(id);
    if (ib != inbox_.end()) {
      inbox = std::move(ib->second);
      inbox_.erase(ib);
    }
    auto out = actor.step(inbox, view);
    for (auto& m : out) {
      m.seq = seq_++;
      note_emitted(m);
      process_client_message(actor, m, t);
    }
  }
  inbox_.clear();
}

void Simulation::process_client_message(ClientActor& actor, const Message& m,
                                        Tick t) {
  if (!verify_message(m, keys_)) {
    note_dropped(m);
    return;
  }
  switch (m.kind) {
    case MsgKind::PutOrder: {
      report_.orders_put += 1;
      if (tracker_.frozen(m.client, t)) {
        report_.puts_rejected_frozen += 1;
        note_dropped(m);
        return;
      }
      if (tracker_.in_window(cfg_.threshold, m.client, m.service, t) >=
          cfg_.threshold.max_requests) {
        auto d = tracker_.enforce(cfg_.threshold, m.client, m.service, t);
        if (threshold_allows(d))
          throw InvariantViolation("threshold allowed a full window");
        report_.puts_rejected_frozen += 1;
        note_dropped(m);
        return;
      }
      auto put = ledger_.put_order(m.client, m.service, m.mode, m.price, m.chosen);
      if (!put.ok()) {
        report_.puts_rejected_ledger += 1;
        note_dropped(m);
        return;
      }
      auto d = tracker_.enforce(cfg_.threshold, m.client, m.service, t);
      if (!threshold_allows(d))
        throw InvariantViolation("threshold flipped within a tick");
      OrderId oid = put.value();
      report_.orders_accepted += 1;
      actor.order_accepted(oid, t);
      submit_log_.emplace_back(oid, t);
      if (flooder_clients_.count(m.client) != 0) flooder_accepts_.push_back(t);
      note_processed(m);
      allocate_order(oid, t, true);
      return;
    }
    case MsgKind::RateMsg: {
      if (is_restricted(restrictions_[m.client], t)) {
        report_.ratings_rejected_restricted += 1;
        note_dropped(m);
        return;
      }
      Status st = ledger_.rate_service(m.client, m.miner, m.rating);
      if (!st.ok()) {
        note_dropped(m);
        return;
      }
      report_.ratings_accepted += 1;
      report_.ratings_received[m.miner] += 1;
      note_processed(m);
      deviant_check(m.client, m.miner, m.rating, t);
      return;
    }
    case MsgKind::Confirmation:
      note_processed(m);
      return;
    default:
      note_dropped(m);
      return;
  }
}

void Simulation::allocate_order(OrderId order_id, Tick t, bool first_attempt) {
  const Order* order = ledger_.find_order(order_id);
  if (order == nullptr) throw InvariantViolation("allocating unknown order");
  auto frozen = [&](const AccountId& a) { return tracker_.frozen(a, t); };
  auto routed = route_request(ledger_, *order, beacon_, frozen);
  if (!routed.ok()) {
    // First failure counts; the order then waits in the retry queue until a
    // provider frees up or the order expires.
    if (first_attempt) report_.routing_failures += 1;
    unrouted_.push_back(order_id);
    return;
  }
  const MinerId& miner = routed.value();
  auto alloc = ledger_.record_allocation(order_id, miner);
  if (!alloc.ok()) throw InvariantViolation("allocation of routed order failed");
  auto mit = miners_.find(miner);
  if (mit == miners_.end())
    throw InvariantViolation("routed to unknown miner actor");
  mit->second.on_allocation(order_id, order->client, order->service_type, t);
  report_.emitted["Allocation"] += 1;
  report_.processed["Allocation"] += 1;

  if (order->mode == OrderMode::Uncharged && !adversary_miners_.empty()) {
    double total = 0.0;
    double adv = 0.0;
    for (const auto& [mid, node] : ledger_.nodes()) {
      if (node.status != MinerStatus::Ready) continue;
      if (node.supported_services.count(order->service_type) == 0) continue;
      if (frozen(mid)) continue;
      total += node.reputation;
      if (adversary_miners_.count(mid) != 0) adv += node.reputation;
    }
    if (total > 0.0) {
      adv_expect_sum_ += static_cast<long double>(adv / total);
      adv_expect_n_ += 1;
    }
  }
}

void Simulation::deviant_check(const AccountId& client, const MinerId& miner,
                               Rating rating, Tick t) {
  const NodeInfo* node = ledger_.find_node(miner);
  if (node == nullptr) return;
  const auto& latest = node->latest_ratings;
  if (latest.size() < 3) return;
  int counts[3] = {0, 0, 0};
  for (const auto& [other, r] : latest) {
    if (other == client) continue;
    counts[static_cast<int>(r)] += 1;
  }
  int best = std::max({counts[0], counts[1], counts[2]});
  int holders = (counts[0] == best) + (counts[1] == best) + (counts[2] == best);
  if (holders != 1) return;  // tied co-rater majority carries no signal
  Rating majority = counts[0] == best   ? Rating::Good
                    : counts[1] == best ? Rating::Fair
                                        : Rating::Bad;
  auto& hist = deviation_history_[client];
  hist.push_back({rating, majority});
  std::size_t window = static_cast<std::size_t>(
      std::max(cfg_.reputation.deviation_window, 1));
  if (hist.size() > window)
    hist.erase(hist.begin(),
               hist.begin() + static_cast<std::ptrdiff_t>(hist.size() - window));
  if (detect_deviant_reviewer(hist, cfg_.reputation)) {
    auto st = apply_restriction(restrictions_[client], client, t, cfg_.reputation);
    restrictions_[client] = st;
    RestrictionEvent ev;
    ev.client = client;
    ev.at = t;
    ev.duration = st.until - t;
    ev.level = st.level;
    report_.restrictions.push_back(ev);
    hist.clear();  // each offense re-accumulates evidence from scratch
  }
}

void Simulation::miner_phase(Tick t) {
  for (auto& [id, actor] : miners_) {
    MinerView view;
    view.ledger = &ledger_;
    view.catalog = &catalog_;
    view.now = t;
    view.link_delay = cfg_.link_delay;
    auto out = actor.step(view, keys_);
    for (auto& m : out) {
      m.seq = seq_++;
      note_emitted(m);
      if (m.kind == MsgKind::ExecClaim) {
        process_claim(m, t);
      } else if (m.kind == MsgKind::Output) {
        scheduled_[std::max(m.deliver_at, t + 1)].push_back(m);
      } else {
        note_dropped(m);
      }
    }
    const NodeInfo* node = ledger_.find_node(id);
    if (node != nullptr && node->status != MinerStatus::Unregistered) {
      MinerStatus want = actor.busy() ? MinerStatus::Busy : MinerStatus::Ready;
      if (node->status != want) {
        Status st = ledger_.set_miner_status(id, want);
        if (!st.ok()) throw InvariantViolation("miner status sync failed");
      }
    }
  }
}

void Simulation::process_claim(const Message& m, Tick t) {
  const Order* order = ledger_.find_order(m.order);
  Status st = ledger_.record_completion(m.order, m.sig);
  if (order == nullptr || !st.ok()) {
    note_dropped(m);
    return;
  }
  if (order->mode == OrderMode::Charged) {
    auto pay = charged_payment(ledger_, m.order, ledger_.config().fee);
    if (!pay.ok())
      throw InvariantViolation("charged settlement failed after completion");
  }
  note_processed(m);
  report_.orders_completed += 1;
  report_.client_served[order->client] += 1;
  report_.latency_hist[t - order->submitted_at] += 1;
}

void Simulation::epoch_boundary(Tick t) {
  std::uint64_t index = t / cfg_.epoch_ticks;
  EpochMetrics em;
  em.index = index;
  em.at_tick = t;
  TokenAmount minted =
      ledger_.mint_epoch_pool(cfg_.inflation_rate, cfg_.epochs_per_year);
  em.pool_minted_base = minted.base_units();
  RewardEpoch ep = ledger_.distribute_rewards(index);
  for (const auto& [mid, amt] : ep.allocations) {
    em.pool_distributed_base += amt.base_units();
    em.allocations_base[mid] = amt.base_units();
    report_.total_reward_base += amt.base_units();
    if (adversary_miners_.count(mid) != 0)
      report_.adversary_reward_base += amt.base_units();
  }
  for (const auto& [mid, node] : ledger_.nodes())
    em.reputation_q12[mid] = rep_q12(node.reputation);

  const TokenState& tok = ledger_.token();
  em.circulating_base = tok.circulating.base_units();
  em.total_minted_base = tok.total_minted.base_units();
  em.circulating_delta_base =
      static_cast<std::int64_t>(tok.circulating.base_units()) -
      static_cast<std::int64_t>(circulating_prev_);
  em.locks_base = epoch_locks_;
  em.unlocks_base = epoch_unlocks_;
  circulating_prev_ = tok.circulating.base_units();
  epoch_locks_ = 0;
  epoch_unlocks_ = 0;

  Hash32 state = ledger_.state_hash();
  auto proposed = propose_checkpoint(coordinators_, last_committed_, index, state);
  if (!proposed.ok()) throw InvariantViolation("checkpoint proposal failed");
  Checkpoint honest = proposed.value();
  Checkpoint forged = honest;
  forged.state_hash[31] ^= 0xff;
  for (std::uint32_t i = 0; i < coordinators_.c(); ++i) {
    const CoordinatorId& cid = coordinators_.members[i].id;
    if (i < cfg_.equivocators) {
      // Equivocators sign both branches; safety must come from the honest
      // majority, not from adversarial restraint.
      sign_and_collect(forged, coordinators_, cid, keys_);
      sign_and_collect(honest, coordinators_, cid, keys_);
    } else {
      sign_and_collect(honest, coordinators_, cid, keys_);
    }
  }
  bool honest_ok = is_committed(honest, coordinators_, keys_);
  bool forged_ok = is_committed(forged, coordinators_, keys_);
  em.checkpoint_height = index;
  em.checkpoint_committed = honest_ok;
  em.conflicting_commit = honest_ok && forged_ok;
  if (honest_ok) last_committed_ = index;

  report_.epochs.push_back(em);
}

void Simulation::finish() {
  for (const auto& [when, msgs] : scheduled_) {
    (void)when;
    for (const auto& m : msgs) note_dropped(m);
  }
  scheduled_.clear();

  std::vector<std::uint64_t> counts;
  counts.reserve(clients_.size());
  for (const auto& [id, actor] : clients_) {
    (void)actor;
    counts.push_back(report_.client_served[id]);
  }
  report_.fairness_q12 = jain_fairness_q12(counts);

  for (const auto& [mid, node] : ledger_.nodes())
    report_.final_reputation_q12[mid] = rep_q12(node.reputation);

  report_.flooder_max_group_window =
      max_in_window(flooder_accepts_, cfg_.threshold.window);
  report_.adversary_ids.assign(adversary_set_.begin(), adversary_set_.end());
  if (adv_expect_n_ > 0)
    report_.adversary_expected_share_q12 = static_cast<std::int64_t>(
        std::llround(static_cast<double>(adv_expect_sum_ /
                                         static_cast<long double>(adv_expect_n_)) *
                     1e12));

  for (const auto& [kind, emitted] : report_.emitted) {
    std::uint64_t accounted = 0;
    auto p = report_.processed.find(kind);
    if (p != report_.processed.end()) accounted += p->second;
    auto d = report_.dropped.find(kind);
    if (d != report_.dropped.end()) accounted += d->second;
    if (emitted != accounted)
      throw InvariantViolation("message audit mismatch for kind " + kind);
  }
  report_.final_state_hash_hex = hex(ledger_.state_hash());
}

SimResult Simulation::run() {
  auto wall0 = std::chrono::steady_clock::now();
  genesis();
  circulating_prev_ = ledger_.token().circulating.base_units();
  epoch_locks_ = 0;
  epoch_unlocks_ = 0;
  report_.seed = cfg_.seed;
  report_.ticks = cfg_.ticks;
  report_.epoch_ticks = cfg_.epoch_ticks;

  for (Tick t = 1; t <= cfg_.ticks; ++t) {
    ledger_.advance_tick(t);
    scripted_stakes(t);
    expiry_sweep(t);
    retry_routing(t);
    deliver(t);
    client_phase(t);
    miner_phase(t);
    if (t % cfg_.epoch_ticks == 0) epoch_boundary(t);
    ledger_.token().check_conservation();
  }
  finish();

  auto wall1 = std::chrono::steady_clock::now();
  double secs = std::chrono::duration<double>(wall1 - wall0).count();
  report_.wall_cycles_per_sec =
      secs > 0.0 ? static_cast<double>(report_.orders_completed) / secs : 0.0;

  SimResult res;
  res.report = report_;
  res.final_hash = ledger_.state_hash();
  return res;
}

}  // namespace

Result<SimResult> run_scenario(const ScenarioConfig& cfg, std::string& error) {
  Status v = validate_scenario(cfg, error);
  if (!v.ok()) return v.error();
  Simulation sim(cfg);
  return sim.run();
}

}  // namespace mpsim
