// Coordinator quorum: checkpoints over the canonical ledger encoding committed
// by m-of-c signatures, the linear attack-budget model, and per-client request
// throttling. Replicas are value-isolated; a checkpoint is just data.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mpsim/crypto.hpp"
#include "mpsim/ledger.hpp"
#include "mpsim/types.hpp"

namespace mpsim {

struct CoordinatorMember {
  CoordinatorId id;
  TokenAmount stake;
};

struct CoordinatorSet {
  std::vector<CoordinatorMember> members;
  std::uint32_t m = 18;  // signature threshold

  std::uint32_t c() const { return static_cast<std::uint32_t>(members.size()); }
  bool has_member(const CoordinatorId& id) const;
  // 1 <= m <= c and equal stakes throughout.
  void validate() const;
};

struct Checkpoint {
  std::uint64_t height = 0;
  Hash32 state_hash{};
  std::map<CoordinatorId, Signature> signatures;
};

// Bytes a coordinator signs: the height/hash prefix of the wire format.
std::vector<std::uint8_t> checkpoint_preimage(std::uint64_t height,
                                              const Hash32& state_hash);

// height (8B BE) || state_hash (32B) || count (4B BE) || per signer:
// id (length-prefixed) || signature (32B). Signers in id order.
std::vector<std::uint8_t> checkpoint_wire(const Checkpoint& cp);

Result<Checkpoint> propose_checkpoint(const CoordinatorSet& set,
                                      std::uint64_t last_committed,
                                      std::uint64_t height,
                                      const Hash32& state_hash);

Status sign_and_collect(Checkpoint& cp, const CoordinatorSet& set,
                        const CoordinatorId& signer, const KeyStore& keys);

bool is_committed(const Checkpoint& cp, const CoordinatorSet& set,
                  const KeyStore& keys);

// Minimum budget to control a signing quorum: d tokens per member, m members.
TokenAmount attack_budget(std::uint32_t m, TokenAmount d);

// Quorum takeover cost as parts-per-million of circulation, given that honest
// coordinators hold honest_ppm of circulation split equally across c members:
// floor(m * honest_ppm / c).
std::uint64_t quorum_budget_ppm(std::uint32_t m, std::uint32_t c,
                                std::uint64_t honest_ppm);

// -- request throttling -----------------------------------------------------

struct ThresholdPolicy {
  std::uint32_t max_requests = 10;  // accepted orders per window per service
  Tick window = 100;
  Tick freeze = 100;
};

struct ThresholdAllow {};
struct ThresholdFrozen {
  Tick until = 0;
};
using ThresholdDecision = std::variant<ThresholdAllow, ThresholdFrozen>;

inline bool threshold_allows(const ThresholdDecision& d) {
  return std::holds_alternative<ThresholdAllow>(d);
}

// Sliding-window accounting of accepted requests per (client, service).
// A decision of Allow also records the request; Frozen rejects it.
class ThresholdTracker {
 public:
  ThresholdDecision enforce(const ThresholdPolicy& policy,
                            const AccountId& client,
                            const ServiceTypeId& service, Tick now);
  // Accepted requests currently inside the window.
  std::uint32_t in_window(const ThresholdPolicy& policy,
                          const AccountId& client,
                          const ServiceTypeId& service, Tick now) const;
  bool frozen(const AccountId& client, Tick now) const;

 private:
  using Key = std::pair<AccountId, ServiceTypeId>;
  std::map<Key, std::vector<Tick>> accepted_;
  std::map<AccountId, Tick> frozen_until_;
};

}  // namespace mpsim
