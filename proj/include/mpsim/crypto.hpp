// Hash primitives behind the signing and randomness stand-ins. SHA-256/HMAC
// come from OpenSSL; everything above this layer is interchangeable with real
// asymmetric signatures or a real VRF.

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace mpsim {

using Hash32 = std::array<std::uint8_t, 32>;
using Signature = Hash32;

Hash32 sha256(const std::uint8_t* data, std::size_t len);
Hash32 sha256(const std::vector<std::uint8_t>& data);
Hash32 sha256(const std::string& data);

// HMAC-SHA256 with a 32-byte key.
Hash32 hmac_sha256(const Hash32& key, const std::uint8_t* data, std::size_t len);
Hash32 hmac_sha256(const Hash32& key, const std::vector<std::uint8_t>& data);

std::string hex(const Hash32& h);

}  // namespace mpsim
