#ifndef DELIB_DIGEST_HPP_
#define DELIB_DIGEST_HPP_

#include <openssl/evp.h>

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace delib {

using Sha256 = std::array<std::uint8_t, 32>;

inline Sha256 sha256(std::string_view bytes) {
  Sha256 out{};
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), out.data(), &len, EVP_sha256(),
             nullptr);
  return out;
}

inline std::string to_hex(const Sha256 &digest) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(digest.size() * 2);
  for (auto b : digest) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0xF]);
  }
  return out;
}

/// Lowercase hex SHA-256 of `bytes`.
inline std::string sha256_hex(std::string_view bytes) {
  return to_hex(sha256(bytes));
}

/// First eight digest bytes, big-endian. Used to seed PRNGs.
inline std::uint64_t sha256_u64(std::string_view bytes) {
  auto d = sha256(bytes);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | d[i];
  return v;
}

}  // namespace delib

#endif  // DELIB_DIGEST_HPP_
