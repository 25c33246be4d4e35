#pragma once

#include <string>
#include <string_view>

namespace rfp::detail {

// Lowercase hex digests over arbitrary bytes (OpenSSL EVP one-shot).
std::string sha256_hex(std::string_view data);
std::string md5_hex(std::string_view data);

}  // namespace rfp::detail
