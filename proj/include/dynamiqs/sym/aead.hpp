#pragma once

#include <openssl/evp.h>

#include <memory>

#include "dynamiqs/random.hpp"

namespace dynamiqs::sym {

enum class KeyRole : std::uint8_t { Session = 1, GroupCspaRsu = 2, GroupRsuCp = 3, Content = 4 };

inline const char* to_string(KeyRole r) {
  switch (r) {
    case KeyRole::Session: return "session";
    case KeyRole::GroupCspaRsu: return "group-cspa-rsu";
    case KeyRole::GroupRsuCp: return "group-rsu-cp";
    case KeyRole::Content: return "content";
  }
  return "unknown";
}

struct SymmetricKey {
  Block32 bytes{};
  KeyRole role = KeyRole::Session;

  friend bool operator==(const SymmetricKey&, const SymmetricKey&) = default;
};

inline constexpr std::size_t kNonceSize = 12;
inline constexpr std::size_t kTagSize = 16;

namespace detail {

using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, decltype(&EVP_CIPHER_CTX_free)>;

inline CipherCtx new_ctx() {
  CipherCtx ctx(EVP_CIPHER_CTX_new(), &EVP_CIPHER_CTX_free);
  if (!ctx) throw Error("EVP_CIPHER_CTX_new failed");
  return ctx;
}

}  // namespace detail

// AES-256-GCM. Output layout: nonce (12) || ciphertext || tag (16).
inline Bytes aead_seal_with_nonce(const SymmetricKey& key, ByteView nonce, ByteView plaintext,
                                  ByteView associated_data) {
  if (nonce.size() != kNonceSize) throw LengthError("GCM nonce must be 12 bytes");
  auto ctx = detail::new_ctx();
  int len = 0;
  Bytes out(kNonceSize + plaintext.size() + kTagSize);
  std::copy(nonce.begin(), nonce.end(), out.begin());
  if (EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.bytes.data(), nonce.data()) != 1 ||
      EVP_EncryptUpdate(ctx.get(), nullptr, &len, associated_data.data(), static_cast<int>(associated_data.size())) !=
          1 ||
      EVP_EncryptUpdate(ctx.get(), out.data() + kNonceSize, &len, plaintext.data(),
                        static_cast<int>(plaintext.size())) != 1 ||
      EVP_EncryptFinal_ex(ctx.get(), out.data() + kNonceSize + len, &len) != 1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kTagSize, out.data() + out.size() - kTagSize) != 1)
    throw Error("AES-GCM encryption failed");
  return out;
}

inline Bytes aead_seal(const SymmetricKey& key, ByteView plaintext, ByteView associated_data,
                       SeededRandomSource& rng) {
  auto nonce = rng.bytes(kNonceSize);
  return aead_seal_with_nonce(key, nonce, plaintext, associated_data);
}

// Throws AuthenticationFailure on any tampering with key, nonce, ciphertext,
// tag or associated data.
inline Bytes aead_open(const SymmetricKey& key, ByteView sealed, ByteView associated_data) {
  if (sealed.size() < kNonceSize + kTagSize) throw AuthenticationFailure();
  const auto body = sealed.size() - kNonceSize - kTagSize;
  auto ctx = detail::new_ctx();
  Bytes out(body);
  int len = 0;
  Bytes tag(sealed.end() - kTagSize, sealed.end());
  if (EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.bytes.data(), sealed.data()) != 1 ||
      EVP_DecryptUpdate(ctx.get(), nullptr, &len, associated_data.data(), static_cast<int>(associated_data.size())) !=
          1 ||
      EVP_DecryptUpdate(ctx.get(), out.data(), &len, sealed.data() + kNonceSize, static_cast<int>(body)) != 1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kTagSize, tag.data()) != 1)
    throw AuthenticationFailure();
  int fin = 0;
  if (EVP_DecryptFinal_ex(ctx.get(), out.data() + len, &fin) != 1) throw AuthenticationFailure();
  return out;
}

}  // namespace dynamiqs::sym
