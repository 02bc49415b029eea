#include "mpsim/bus.hpp"

namespace mpsim {

const char* msg_kind_name(MsgKind k) {
  switch (k) {
    case MsgKind::PutOrder: return "PutOrder";
    case MsgKind::Allocation: return "Allocation";
    case MsgKind::ExecClaim: return "ExecClaim";
    case MsgKind::Output: return "Output";
    case MsgKind::Confirmation: return "Confirmation";
    case MsgKind::RateMsg: return "RateMsg";
    case MsgKind::RegisterMsg: return "RegisterMsg";
    case MsgKind::UnregisterMsg: return "UnregisterMsg";
  }
  return "?";
}

std::vector<std::uint8_t> message_preimage(const Message& m) {
  // A claim's signature must be exactly what the ledger's completion check
  // verifies, so that preimage is shared rather than wrapped.
  if (m.kind == MsgKind::ExecClaim) return exec_claim_bytes(m.order, m.miner);
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(m.kind));
  w.str(m.sender);
  switch (m.kind) {
    case MsgKind::PutOrder:
      w.str(m.client);
      w.str(m.service);
      w.u8(m.mode == OrderMode::Charged ? 1 : 0);
      w.token(m.price);
      w.u8(m.chosen.has_value() ? 1 : 0);
      if (m.chosen) w.str(*m.chosen);
      break;
    case MsgKind::Allocation:
      w.u64(m.order);
      w.str(m.miner);
      break;
    case MsgKind::ExecClaim:
      break;  // handled above
    case MsgKind::Output:
      w.u64(m.order);
      w.str(m.miner);
      w.u8(m.output_ok ? 1 : 0);
      break;
    case MsgKind::Confirmation:
      w.u64(m.order);
      w.str(m.client);
      break;
    case MsgKind::RateMsg:
      w.str(m.client);
      w.str(m.miner);
      w.u8(static_cast<std::uint8_t>(m.rating));
      break;
    case MsgKind::RegisterMsg:
      w.str(m.miner);
      w.token(m.collateral);
      w.u32(static_cast<std::uint32_t>(m.services.size()));
      for (const auto& s : m.services) w.str(s);
      break;
    case MsgKind::UnregisterMsg:
      w.str(m.miner);
      break;
  }
  return w.take();
}

Message signed_message(Message m, const KeyStore& keys) {
  m.sig = keys.sign(m.sender, message_preimage(m));
  return m;
}

bool verify_message(const Message& m, const KeyStore& keys) {
  return keys.verify(m.sender, message_preimage(m), m.sig);
}

}  // namespace mpsim
