#pragma once

#include <map>
#include <memory>
#include <mutex>

#include "dynamiqs/ibe/ntru_solve.hpp"
#include "dynamiqs/ibe/trapdoor.hpp"
#include "dynamiqs/ring/hash_to_ring.hpp"

namespace dynamiqs::ibe {

using ring::IntegerPolynomial;
using ring::RingElement;
using ring::RingParams;

// Largest Gram-Schmidt norm the extraction width can smooth over.
inline constexpr double kSmoothingRatio = 1.32;

inline double gs_bound(const RingParams& p) { return p.sigma_extract / kSmoothingRatio; }

struct MasterPublicKey {
  RingParams params;
  RingElement h;

  friend bool operator==(const MasterPublicKey&, const MasterPublicKey&) = default;
};

struct UserSecretKey {
  RingElement id_digest;  // t = H(identity)
  RingElement s1;
  RingElement s2;

  const RingParams& params() const { return id_digest.params(); }
  double norm() const { return std::sqrt(s1.centered_norm_sq() + s2.centered_norm_sq()); }

  friend bool operator==(const UserSecretKey&, const UserSecretKey&) = default;
};

struct Signature {
  Block32 salt{};
  RingElement s1;
  RingElement s2;

  friend bool operator==(const Signature&, const Signature&) = default;
};

class MasterSecretKey {
 public:
  MasterSecretKey() = default;

  MasterSecretKey(RingParams params, IntegerPolynomial f, IntegerPolynomial g, IntegerPolynomial F,
                  IntegerPolynomial G)
      : params_(params),
        f_(std::move(f)),
        g_(std::move(g)),
        F_(std::move(F)),
        G_(std::move(G)),
        state_(std::make_shared<State>()) {
    if (f_.size() != params_.n || g_.size() != params_.n || F_.size() != params_.n || G_.size() != params_.n)
      throw LengthError("master key polynomials must have N coefficients");
  }

  const RingParams& params() const { return params_; }
  const IntegerPolynomial& f() const { return f_; }
  const IntegerPolynomial& g() const { return g_; }
  const IntegerPolynomial& F() const { return F_; }
  const IntegerPolynomial& G() const { return G_; }

  // f*G - g*F == q exactly.
  bool satisfies_ntru_equation() const {
    return f_ * G_ - g_ * F_ == IntegerPolynomial::constant(params_.n, ring::BigInt(params_.q));
  }

  ring::Matrix<std::int64_t> basis() const {
    return assemble_basis(f_.to_int64(), g_.to_int64(), F_.to_int64(), G_.to_int64());
  }

  // Gram-Schmidt data is computed on first use and shared between copies.
  const KleinSampler& sampler() const {
    std::call_once(state_->sampler_once,
                   [&] { state_->sampler = std::make_unique<KleinSampler>(basis(), params_.sigma_extract); });
    return *state_->sampler;
  }

  // Digest of the secret polynomials; seeds deterministic extraction.
  const Block32& fingerprint() const {
    std::call_once(state_->fingerprint_once, [&] {
      ByteWriter w;
      w.raw(as_view("dynamiqs-msk"));
      for (const auto* p : {&f_, &g_, &F_, &G_}) ring::write_integer_poly(w, *p);
      state_->fingerprint = sym::sha256(w.bytes());
    });
    return state_->fingerprint;
  }

  // Per-identity extraction cache; one key per identity digest.
  std::optional<UserSecretKey> cached(const Bytes& digest) const {
    std::lock_guard lock(state_->cache_mu);
    auto it = state_->cache.find(digest);
    if (it == state_->cache.end()) return std::nullopt;
    return it->second;
  }

  UserSecretKey remember(const Bytes& digest, UserSecretKey key) const {
    std::lock_guard lock(state_->cache_mu);
    return state_->cache.try_emplace(digest, std::move(key)).first->second;
  }

  std::size_t cache_size() const {
    std::lock_guard lock(state_->cache_mu);
    return state_->cache.size();
  }

  friend bool operator==(const MasterSecretKey& a, const MasterSecretKey& b) {
    return a.params_ == b.params_ && a.f_ == b.f_ && a.g_ == b.g_ && a.F_ == b.F_ && a.G_ == b.G_;
  }

 private:
  struct State {
    std::once_flag sampler_once;
    std::unique_ptr<KleinSampler> sampler;
    std::once_flag fingerprint_once;
    Block32 fingerprint{};
    mutable std::mutex cache_mu;
    std::map<Bytes, UserSecretKey> cache;
  };

  RingParams params_;
  IntegerPolynomial f_, g_, F_, G_;
  std::shared_ptr<State> state_;
};

struct MasterKeyPair {
  MasterSecretKey secret;
  MasterPublicKey public_key;
};

}  // namespace dynamiqs::ibe
