#include "mpsim/actors.hpp"

#include <algorithm>

namespace mpsim {

std::vector<Message> ClientActor::step(const std::vector<Message>& inbox,
                                       const ClientView& view) {
  std::vector<Message> out;
  const GlobalLedger& ledger = *view.ledger;

  for (const auto& msg : inbox) {
    if (msg.kind != MsgKind::Output) continue;
    auto it = awaiting_.find(msg.order);
    if (it == awaiting_.end()) continue;
    awaiting_.erase(it);

    Message confirm;
    confirm.kind = MsgKind::Confirmation;
    confirm.sender = id_;
    confirm.order = msg.order;
    confirm.client = id_;
    confirm.deliver_at = view.now;
    out.push_back(confirm);

    bool rate = false;
    Rating r = Rating::Good;
    if (params_.kind == ActorKind::SelfDealingPair) {
      // Boost the colluding miner only; outputs from anyone else go unrated.
      rate = msg.miner == params_.own_miner;
      r = Rating::Good;
    } else if (rated_.count(msg.order) == 0 &&
               rng_.chance(params_.p_rate)) {
      rate = true;
      r = adjust_rating(honest_rating(msg, view));
    }
    if (rate && rated_.insert(msg.order).second) {
      Message rm;
      rm.kind = MsgKind::RateMsg;
      rm.sender = id_;
      rm.client = id_;
      rm.miner = msg.miner;
      rm.order = msg.order;
      rm.rating = r;
      rm.deliver_at = view.now;
      out.push_back(rm);
    }
  }

  auto timed_out = sweep_timeouts(view);
  out.insert(out.end(), timed_out.begin(), timed_out.end());

  bool demand = demand_on_ &&
                view.now % params_.demand_period == params_.demand_offset;
  if (params_.kind == ActorKind::SybilFlooder) demand = demand_on_;
  // Honest clients hold demand while frozen; the flooder keeps hammering so
  // the coordinator-side gate is what bounds it.
  bool gated = view.frozen && params_.kind != ActorKind::SybilFlooder;
  if (demand && !gated) {
    Message put;
    put.kind = MsgKind::PutOrder;
    put.sender = id_;
    put.client = id_;
    put.service = params_.service;
    put.mode = params_.mode;
    put.price = params_.price;
    put.chosen = params_.chosen;
    put.deliver_at = view.now;
    out.push_back(put);
  }

  if (view.keys != nullptr)
    for (auto& m : out) m = signed_message(std::move(m), *view.keys);
  (void)ledger;
  return out;
}

void ClientActor::order_accepted(OrderId id, Tick now) {
  awaiting_[id] = now;
}

Rating ClientActor::honest_rating(const Message& output,
                                  const ClientView& view) const {
  if (!output.output_ok) return Rating::Bad;
  const TaskCycleRecord* cycle = view.ledger->find_cycle(output.order);
  if (cycle != nullptr) {
    auto cat = view.catalog->find(output.service.empty()
                                      ? params_.service
                                      : output.service);
    Tick promised = cat != view.catalog->end() ? cat->second.latency : 1;
    // Every output pays one delivery hop on top of the service time; only
    // queueing delay beyond that reads as late.
    if (output.deliver_at > cycle->allocated_at + promised + 1 + view.link_delay)
      return Rating::Fair;
  }
  return Rating::Good;
}

Rating ClientActor::adjust_rating(Rating r) const {
  if (params_.kind != ActorKind::DeviantReviewer) return r;
  switch (r) {
    case Rating::Good: return Rating::Bad;
    case Rating::Bad: return Rating::Good;
    case Rating::Fair: return Rating::Fair;
  }
  return r;
}

std::vector<Message> ClientActor::sweep_timeouts(const ClientView& view) {
  std::vector<Message> out;
  std::vector<OrderId> done;
  for (const auto& [order, since] : awaiting_) {
    (void)since;
    if (view.ledger->order_expired(order)) {
      done.push_back(order);
      continue;
    }
    const TaskCycleRecord* cycle = view.ledger->find_cycle(order);
    if (cycle == nullptr) continue;  // not yet allocated
    if (view.now < cycle->allocated_at + params_.output_timeout) continue;
    // Output never arrived. Rate the serving miner down if a completed
    // service links us (the withheld claim itself counts).
    if (rated_.count(order) == 0 &&
        view.ledger->has_completed_service(id_, cycle->miner)) {
      rated_.insert(order);
      Message rm;
      rm.kind = MsgKind::RateMsg;
      rm.sender = id_;
      rm.client = id_;
      rm.miner = cycle->miner;
      rm.order = order;
      rm.rating = Rating::Bad;
      rm.deliver_at = view.now;
      out.push_back(rm);
    }
    done.push_back(order);
  }
  for (OrderId id : done) awaiting_.erase(id);
  return out;
}

void MinerActor::on_allocation(OrderId order, const AccountId& client,
                               const ServiceTypeId& service, Tick now) {
  (void)now;
  QueuedOrder q{order, client, service};
  pending_.push_back(q);
  by_id_[order] = q;
}

void MinerActor::drop_order(OrderId order) {
  by_id_.erase(order);
  pending_.erase(std::remove_if(pending_.begin(), pending_.end(),
                                [&](const QueuedOrder& q) {
                                  return q.order == order;
                                }),
                 pending_.end());
  if (batch_) {
    auto& serve = batch_->serve;
    auto it = std::find(serve.begin() + static_cast<std::ptrdiff_t>(batch_->next),
                        serve.end(), order);
    if (it != serve.end()) serve.erase(it);
  }
}

bool MinerActor::has_order(OrderId order) const {
  return by_id_.count(order) != 0;
}

std::size_t MinerActor::queued() const { return pending_.size(); }

void MinerActor::open_batch(const MinerView& view) {
  // Group pending requests per client, FIFO preserved; a client with no
  // stake on record borrows the smallest staked value in the batch so the
  // weight floor stays at one.
  std::map<AccountId, BatchEntry> grouped;
  for (const auto& q : pending_) {
    auto& e = grouped[q.client];
    e.client = q.client;
    e.request_ids.push_back(q.order);
  }
  std::uint64_t min_usd = 0;
  for (auto& [client, e] : grouped) {
    auto it = view.ledger->stakes().find(client);
    if (it == view.ledger->stakes().end()) continue;
    if (min_usd == 0 || it->second.value_usd_micro < min_usd)
      min_usd = it->second.value_usd_micro;
  }
  if (min_usd == 0) min_usd = 1;
  RequestBatch batch;
  batch.miner = id_;
  batch.opened_at = view.now;
  for (auto& [client, e] : grouped) {
    auto it = view.ledger->stakes().find(client);
    std::uint64_t usd =
        it != view.ledger->stakes().end() ? it->second.value_usd_micro : min_usd;
    if (usd == 0) usd = min_usd;
    e.stake = TokenAmount::base(usd);
    batch.entries.push_back(e);
  }

  auto schedule = build_schedule(batch);
  if (!schedule.ok()) return;
  BatchRun run;
  run.serve = schedule.value().serve_order;
  run.next = 0;
  pending_.clear();
  // Deferred requests queue for the next batch in their original order.
  for (OrderId id : schedule.value().deferred) {
    auto q = by_id_.find(id);
    if (q != by_id_.end()) pending_.push_back(q->second);
  }
  if (run.serve.empty()) return;
  auto first = by_id_.find(run.serve.front());
  Tick latency = 1;
  if (first != by_id_.end()) {
    auto cat = view.catalog->find(first->second.service);
    if (cat != view.catalog->end()) latency = cat->second.latency;
  }
  run.item_done_at = view.now + latency + params_.extra_latency;
  batch_ = run;
}

std::vector<Message> MinerActor::step(const MinerView& view,
                                      const KeyStore& keys) {
  std::vector<Message> out;
  if (params_.kind == ActorKind::DoSMiner && params_.dos_mode == DosMode::Silent)
    return out;  // sits on its queue; the expiry sweep cleans up

  if (batch_) {
    while (batch_ && batch_->next < batch_->serve.size() &&
           view.now >= batch_->item_done_at) {
      OrderId order = batch_->serve[batch_->next];
      auto claim = miner_exec(*this, order, keys, view.now);
      if (claim.ok()) {
        out.push_back(claim.value());
        bool withhold = params_.kind == ActorKind::DoSMiner &&
                        params_.dos_mode == DosMode::Withhold;
        if (!withhold) {
          auto output = miner_send_output(*this, order, view.now,
                                          view.link_delay);
          if (output.ok())
            out.push_back(signed_message(output.value(), keys));
        }
      }
      by_id_.erase(order);
      batch_->next += 1;
      if (batch_->next < batch_->serve.size()) {
        auto nx = by_id_.find(batch_->serve[batch_->next]);
        Tick latency = 1;
        if (nx != by_id_.end()) {
          auto cat = view.catalog->find(nx->second.service);
          if (cat != view.catalog->end()) latency = cat->second.latency;
        }
        batch_->item_done_at = view.now + latency + params_.extra_latency;
      } else {
        batch_.reset();
      }
    }
    return out;
  }

  if (!pending_.empty()) open_batch(view);
  return out;
}

Result<Message> miner_exec(MinerActor& actor, OrderId order,
                           const KeyStore& keys, Tick now) {
  if (actor.by_id_.count(order) == 0) return Err::NotAllocatedToMe;
  actor.claimed_.insert(order);
  Message m;
  m.kind = MsgKind::ExecClaim;
  m.sender = actor.id_;
  m.order = order;
  m.miner = actor.id_;
  m.deliver_at = now;
  m.sig = keys.sign(actor.id_, exec_claim_bytes(order, actor.id_));
  return m;
}

Result<Message> miner_send_output(MinerActor& actor, OrderId order, Tick now,
                                  Tick link_delay) {
  if (actor.claimed_.count(order) == 0) return Err::NotExecuted;
  auto q = actor.by_id_.find(order);
  Message m;
  m.kind = MsgKind::Output;
  m.sender = actor.id_;
  m.order = order;
  m.miner = actor.id_;
  if (q != actor.by_id_.end()) {
    m.client = q->second.client;
    m.service = q->second.service;
  }
  m.output_ok = true;
  // Earliest arrival is the next tick; the current tick's client phase has
  // already run by the time outputs are produced.
  m.deliver_at = now + 1 + link_delay;
  return m;
}

}  // namespace mpsim
