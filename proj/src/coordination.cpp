#include "mpsim/coordination.hpp"

#include <algorithm>

#include "mpsim/encoding.hpp"

namespace mpsim {

bool CoordinatorSet::has_member(const CoordinatorId& id) const {
  for (const auto& mb : members)
    if (mb.id == id) return true;
  return false;
}

void CoordinatorSet::validate() const {
  if (members.empty()) throw InvariantViolation("empty coordinator set");
  if (m < 1 || m > c())
    throw InvariantViolation("signature threshold outside [1, c]");
  for (const auto& mb : members)
    if (mb.stake != members.front().stake)
      throw InvariantViolation("coordinator stakes must be equal");
}

std::vector<std::uint8_t> checkpoint_preimage(std::uint64_t height,
                                              const Hash32& state_hash) {
  ByteWriter w;
  w.u64(height);
  w.hash(state_hash);
  return w.take();
}

std::vector<std::uint8_t> checkpoint_wire(const Checkpoint& cp) {
  ByteWriter w;
  w.u64(cp.height);
  w.hash(cp.state_hash);
  w.u32(static_cast<std::uint32_t>(cp.signatures.size()));
  for (const auto& [id, sig] : cp.signatures) {
    w.str(id);
    w.hash(sig);
  }
  return w.take();
}

Result<Checkpoint> propose_checkpoint(const CoordinatorSet& set,
                                      std::uint64_t last_committed,
                                      std::uint64_t height,
                                      const Hash32& state_hash) {
  set.validate();
  if (height != last_committed + 1) return Err::HeightGap;
  Checkpoint cp;
  cp.height = height;
  cp.state_hash = state_hash;
  return cp;
}

Status sign_and_collect(Checkpoint& cp, const CoordinatorSet& set,
                        const CoordinatorId& signer, const KeyStore& keys) {
  if (!set.has_member(signer)) return Err::NotAMember;
  if (cp.signatures.count(signer) != 0) return Err::DuplicateSignature;
  cp.signatures[signer] =
      keys.sign(signer, checkpoint_preimage(cp.height, cp.state_hash));
  return Status::ok_status();
}

bool is_committed(const Checkpoint& cp, const CoordinatorSet& set,
                  const KeyStore& keys) {
  auto preimage = checkpoint_preimage(cp.height, cp.state_hash);
  std::uint32_t valid = 0;
  for (const auto& [id, sig] : cp.signatures) {
    if (!set.has_member(id)) continue;
    if (keys.verify(id, preimage, sig)) valid += 1;
  }
  return valid >= set.m;
}

TokenAmount attack_budget(std::uint32_t m, TokenAmount d) {
  if (m < 1) throw InvariantViolation("quorum size must be positive");
  if (d == TokenAmount()) throw InvariantViolation("member stake must be positive");
  std::uint64_t total = 0;
  if (__builtin_mul_overflow(d.base_units(), static_cast<std::uint64_t>(m), &total))
    throw InvariantViolation("attack budget overflows");
  return TokenAmount::base(total);
}

std::uint64_t quorum_budget_ppm(std::uint32_t m, std::uint32_t c,
                                std::uint64_t honest_ppm) {
  if (c == 0) throw InvariantViolation("coordinator count must be positive");
  return static_cast<std::uint64_t>(m) * honest_ppm / c;
}

ThresholdDecision ThresholdTracker::enforce(const ThresholdPolicy& policy,
                                            const AccountId& client,
                                            const ServiceTypeId& service,
                                            Tick now) {
  if (policy.max_requests < 1)
    throw InvariantViolation("threshold must allow at least one request");
  auto frozen_it = frozen_until_.find(client);
  if (frozen_it != frozen_until_.end()) {
    if (now < frozen_it->second) return ThresholdFrozen{frozen_it->second};
    frozen_until_.erase(frozen_it);
  }

  auto& stamps = accepted_[{client, service}];
  // In-window at `now`: ticks in (now - window, now].
  Tick cutoff = now >= policy.window ? now - policy.window : 0;
  stamps.erase(std::remove_if(stamps.begin(), stamps.end(),
                              [&](Tick t) {
                                return now >= policy.window && t <= cutoff;
                              }),
               stamps.end());
  if (stamps.size() >= policy.max_requests) {
    Tick until = now + policy.freeze;
    frozen_until_[client] = until;
    return ThresholdFrozen{until};
  }
  stamps.push_back(now);
  return ThresholdAllow{};
}

std::uint32_t ThresholdTracker::in_window(const ThresholdPolicy& policy,
                                          const AccountId& client,
                                          const ServiceTypeId& service,
                                          Tick now) const {
  auto it = accepted_.find({client, service});
  if (it == accepted_.end()) return 0;
  std::uint32_t n = 0;
  for (Tick t : it->second) {
    if (now >= policy.window && t <= now - policy.window) continue;
    n += 1;
  }
  return n;
}

bool ThresholdTracker::frozen(const AccountId& client, Tick now) const {
  auto it = frozen_until_.find(client);
  return it != frozen_until_.end() && now < it->second;
}

}  // namespace mpsim
