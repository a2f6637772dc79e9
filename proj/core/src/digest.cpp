#include "tba/digest.hpp"

#include <openssl/evp.h>

#include "tba/errors.hpp"

namespace tba {

Digest digest(std::span<const std::uint8_t> data) {
  Digest out;
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.bytes.data(), &len, EVP_sha256(), nullptr) != 1 ||
      len != out.bytes.size()) {
    throw Error("SHA-256 computation failed");
  }
  return out;
}

Digest digest(const Bytes& data) { return digest(as_span(data)); }

Digest digest(std::string_view data) { return digest(as_span(data)); }

std::string Digest::hex() const { return to_hex(span()); }

Digest Digest::from_hex(std::string_view hex) {
  Bytes raw = tba::from_hex(hex);
  if (raw.size() != 32) throw Error("digest hex must be 64 characters");
  Digest d;
  std::copy(raw.begin(), raw.end(), d.bytes.begin());
  return d;
}

std::string truncate_hex64(const Digest& d) {
  return to_hex(std::span<const std::uint8_t>(d.bytes.data(), 8));
}

}  // namespace tba
