// Canonical byte encoding for signed messages and state hashing: fields in
// declaration order, big-endian integers, length-prefixed variable fields,
// maps walked in sorted key order. Replicas must agree on these bytes exactly,
// so nothing here may depend on platform endianness or container iteration
// quirks.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mpsim/crypto.hpp"
#include "mpsim/types.hpp"

namespace mpsim {

class ByteWriter {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }

  void u32(std::uint32_t v) {
    out_.push_back(static_cast<std::uint8_t>(v >> 24));
    out_.push_back(static_cast<std::uint8_t>(v >> 16));
    out_.push_back(static_cast<std::uint8_t>(v >> 8));
    out_.push_back(static_cast<std::uint8_t>(v));
  }

  void u64(std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8)
      out_.push_back(static_cast<std::uint8_t>(v >> shift));
  }

  // Two's complement, big-endian.
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }

  void token(TokenAmount t) { u64(t.base_units()); }

  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.insert(out_.end(), s.begin(), s.end());
  }

  void bytes(const std::uint8_t* data, std::size_t len) {
    u32(static_cast<std::uint32_t>(len));
    out_.insert(out_.end(), data, data + len);
  }

  void raw(const std::uint8_t* data, std::size_t len) {
    out_.insert(out_.end(), data, data + len);
  }

  void hash(const Hash32& h) { raw(h.data(), h.size()); }

  const std::vector<std::uint8_t>& data() const { return out_; }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

inline std::uint64_t read_u64_be(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | p[i];
  return v;
}

}  // namespace mpsim
