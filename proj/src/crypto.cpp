#include "mpsim/crypto.hpp"

#include <openssl/hmac.h>
#include <openssl/sha.h>

namespace mpsim {

Hash32 sha256(const std::uint8_t* data, std::size_t len) {
  Hash32 out{};
  SHA256(data, len, out.data());
  return out;
}

Hash32 sha256(const std::vector<std::uint8_t>& data) {
  return sha256(data.data(), data.size());
}

Hash32 sha256(const std::string& data) {
  return sha256(reinterpret_cast<const std::uint8_t*>(data.data()), data.size());
}

Hash32 hmac_sha256(const Hash32& key, const std::uint8_t* data, std::size_t len) {
  Hash32 out{};
  unsigned int out_len = 0;
  HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), data, len,
       out.data(), &out_len);
  return out;
}

Hash32 hmac_sha256(const Hash32& key, const std::vector<std::uint8_t>& data) {
  return hmac_sha256(key, data.data(), data.size());
}

std::string hex(const Hash32& h) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  s.reserve(64);
  for (std::uint8_t b : h) {
    s.push_back(digits[b >> 4]);
    s.push_back(digits[b & 0xf]);
  }
  return s;
}

}  // namespace mpsim
