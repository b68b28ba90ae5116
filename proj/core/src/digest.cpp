#include "rell/digest.hpp"

#include <openssl/evp.h>

namespace rell {

Sha256 sha256(std::string_view data) {
  Sha256 out{};
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr);
  return out;
}

static const char* kHex = "0123456789abcdef";

std::string to_hex(const Sha256& digest) {
  return to_hex_prefix(digest, digest.size() * 2);
}

std::string to_hex_prefix(const Sha256& digest, std::size_t nibbles) {
  std::string out;
  out.reserve(nibbles);
  for (std::size_t i = 0; i < nibbles && i / 2 < digest.size(); ++i) {
    unsigned byte = digest[i / 2];
    out.push_back(kHex[(i % 2 == 0) ? (byte >> 4) : (byte & 0xF)]);
  }
  return out;
}

}  // namespace rell
