// Value-passing message bus. Actors never share state; everything crosses
// tick boundaries as signed Message values ordered by (deliver_at, seq).

#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mpsim/crypto.hpp"
#include "mpsim/encoding.hpp"
#include "mpsim/ledger.hpp"
#include "mpsim/types.hpp"

namespace mpsim {

enum class MsgKind : std::uint8_t {
  PutOrder,
  Allocation,
  ExecClaim,
  Output,
  Confirmation,
  RateMsg,
  RegisterMsg,
  UnregisterMsg,
};

const char* msg_kind_name(MsgKind k);

// One flat record for every kind; unused fields stay defaulted. The signature
// covers the kind tag and the fields that kind carries.
struct Message {
  MsgKind kind = MsgKind::PutOrder;
  std::string sender;
  Tick deliver_at = 0;
  std::uint64_t seq = 0;

  OrderId order = 0;
  AccountId client;
  MinerId miner;
  ServiceTypeId service;
  OrderMode mode = OrderMode::Uncharged;
  TokenAmount price;
  std::optional<MinerId> chosen;
  Rating rating = Rating::Good;
  bool output_ok = true;
  TokenAmount collateral;
  std::set<ServiceTypeId> services;

  Signature sig{};
};

std::vector<std::uint8_t> message_preimage(const Message& m);
Message signed_message(Message m, const KeyStore& keys);
bool verify_message(const Message& m, const KeyStore& keys);

}  // namespace mpsim
