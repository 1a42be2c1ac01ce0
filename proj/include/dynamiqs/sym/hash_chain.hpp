#pragma once

#include <vector>

#include "dynamiqs/sym/sha256.hpp"

namespace dynamiqs::sym {

// link[0] = H(H(T) || H(M_EV)), link[k] = H(link[k-1]); the head link[n] is
// provisioned to the first pad and earlier links are revealed one per pad.
class HashChain {
 public:
  HashChain(const Digest& token_hash, const Digest& m_ev_hash, std::size_t n) {
    if (n == 0) throw LengthError("hash chain needs at least one pad");
    std::copy(token_hash.begin(), token_hash.end(), base_.begin());
    std::copy(m_ev_hash.begin(), m_ev_hash.end(), base_.begin() + 32);
    links_.reserve(n + 1);
    links_.push_back(sha256(base_));
    for (std::size_t k = 1; k <= n; ++k) links_.push_back(sha256(links_.back()));
  }

  std::size_t length() const { return links_.size() - 1; }
  const Digest& link(std::size_t k) const { return links_.at(k); }
  const Digest& head() const { return links_.back(); }
  const std::array<std::uint8_t, 64>& base() const { return base_; }
  const std::vector<Digest>& links() const { return links_; }

  // Value revealed to pad j (1-based): link[n - j].
  const Digest& value_for_pad(std::size_t j) const {
    if (j == 0 || j > length()) throw LengthError("pad index outside the chain");
    return links_[length() - j];
  }

 private:
  std::array<std::uint8_t, 64> base_{};
  std::vector<Digest> links_;
};

inline HashChain build_hash_chain(ByteView token, ByteView m_ev, std::size_t n) {
  if (token.size() != 32 || m_ev.size() != 32) throw LengthError("token and M_EV must be 32 bytes");
  return HashChain(sha256(token), sha256(m_ev), n);
}

inline bool chain_verify(const Digest& candidate, const Digest& expected_head) {
  return sha256(candidate) == expected_head;
}

}  // namespace dynamiqs::sym
