#include "digest.hpp"

#include <openssl/evp.h>

#include <array>

#include "rfp/error.hpp"

namespace rfp::detail {
namespace {

std::string digest_hex(const EVP_MD* md, std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> buf{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), buf.data(), &len, md, nullptr) != 1) {
    throw Error(ErrorKind::Io, "digest computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(static_cast<std::size_t>(len) * 2, '0');
  for (unsigned int i = 0; i < len; ++i) {
    out[2 * i] = kHex[buf[i] >> 4];
    out[2 * i + 1] = kHex[buf[i] & 0x0f];
  }
  return out;
}

}  // namespace

std::string sha256_hex(std::string_view data) { return digest_hex(EVP_sha256(), data); }

std::string md5_hex(std::string_view data) { return digest_hex(EVP_md5(), data); }

}  // namespace rfp::detail
