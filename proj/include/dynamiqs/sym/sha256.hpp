#pragma once

#include <openssl/evp.h>
#include <openssl/sha.h>

#include <memory>

#include "dynamiqs/bytes.hpp"

namespace dynamiqs::sym {

using Digest = Block32;

inline Digest sha256(ByteView data) {
  Digest out;
  ::SHA256(data.data(), data.size(), out.data());
  return out;
}

inline Digest sha256(std::string_view s) { return sha256(as_view(s)); }

// Incremental hashing for multi-part inputs.
class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1)
      throw Error("EVP sha256 init failed");
  }
  Sha256& update(ByteView data) {
    EVP_DigestUpdate(ctx_.get(), data.data(), data.size());
    return *this;
  }
  Sha256& update(std::string_view s) { return update(as_view(s)); }
  Digest finish() {
    Digest out;
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_.get(), out.data(), &len);
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

}  // namespace dynamiqs::sym
