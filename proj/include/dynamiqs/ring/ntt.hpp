#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "dynamiqs/ring/params.hpp"

namespace dynamiqs::ring {

// Negacyclic number-theoretic transform over Z_q with q = 1 mod 2N. The
// forward transform evaluates a polynomial at the N odd powers of a primitive
// 2N-th root of unity psi.
class NegacyclicNtt {
 public:
  NegacyclicNtt(std::uint32_t n, std::uint64_t q) : n_(n), q_(q) {
    psi_ = find_psi();
    const std::uint64_t psi_inv = inv_mod(psi_, q);
    const std::uint64_t omega = mul_mod(psi_, psi_, q);
    const std::uint64_t omega_inv = inv_mod(omega, q);
    n_inv_ = inv_mod(n % q, q);
    psi_pow_.resize(n);
    psi_inv_pow_.resize(n);
    psi_pow_[0] = psi_inv_pow_[0] = 1;
    for (std::uint32_t i = 1; i < n; ++i) {
      psi_pow_[i] = mul_mod(psi_pow_[i - 1], psi_, q);
      psi_inv_pow_[i] = mul_mod(psi_inv_pow_[i - 1], psi_inv, q);
    }
    stage_roots_ = stage_table(omega);
    stage_roots_inv_ = stage_table(omega_inv);
  }

  void forward(std::vector<std::uint64_t>& a) const {
    for (std::uint32_t i = 0; i < n_; ++i) a[i] = mul_mod(a[i], psi_pow_[i], q_);
    transform(a, stage_roots_);
  }

  void inverse(std::vector<std::uint64_t>& a) const {
    transform(a, stage_roots_inv_);
    for (std::uint32_t i = 0; i < n_; ++i) a[i] = mul_mod(mul_mod(a[i], n_inv_, q_), psi_inv_pow_[i], q_);
  }

  std::uint64_t psi() const { return psi_; }

  // Shared immutable tables per (N, q).
  static std::shared_ptr<const NegacyclicNtt> get(std::uint32_t n, std::uint64_t q) {
    static std::mutex mu;
    static std::map<std::pair<std::uint32_t, std::uint64_t>, std::shared_ptr<const NegacyclicNtt>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[{n, q}];
    if (!slot) slot = std::make_shared<const NegacyclicNtt>(n, q);
    return slot;
  }

 private:
  std::uint64_t find_psi() const {
    const std::uint64_t exp = (q_ - 1) / (2ull * n_);
    for (std::uint64_t x = 2; x < q_; ++x) {
      std::uint64_t cand = pow_mod(x, exp, q_);
      if (pow_mod(cand, n_, q_) == q_ - 1) return cand;
    }
    throw InvalidParams("no primitive 2N-th root of unity");
  }

  // Per-stage twiddle powers for an iterative radix-2 transform.
  std::vector<std::uint64_t> stage_table(std::uint64_t omega) const {
    std::vector<std::uint64_t> t;
    for (std::uint32_t len = 2; len <= n_; len <<= 1) {
      std::uint64_t w = pow_mod(omega, n_ / len, q_);
      std::uint64_t cur = 1;
      for (std::uint32_t j = 0; j < len / 2; ++j) {
        t.push_back(cur);
        cur = mul_mod(cur, w, q_);
      }
    }
    return t;
  }

  void transform(std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& roots) const {
    for (std::uint32_t i = 1, j = 0; i < n_; ++i) {
      std::uint32_t bit = n_ >> 1;
      for (; j & bit; bit >>= 1) j ^= bit;
      j ^= bit;
      if (i < j) std::swap(a[i], a[j]);
    }
    std::size_t offset = 0;
    for (std::uint32_t len = 2; len <= n_; len <<= 1) {
      const std::uint32_t half = len / 2;
      for (std::uint32_t i = 0; i < n_; i += len) {
        for (std::uint32_t j = 0; j < half; ++j) {
          std::uint64_t u = a[i + j];
          std::uint64_t v = mul_mod(a[i + j + half], roots[offset + j], q_);
          a[i + j] = u + v >= q_ ? u + v - q_ : u + v;
          a[i + j + half] = u >= v ? u - v : u + q_ - v;
        }
      }
      offset += half;
    }
  }

  std::uint32_t n_;
  std::uint64_t q_;
  std::uint64_t psi_ = 0;
  std::uint64_t n_inv_ = 0;
  std::vector<std::uint64_t> psi_pow_, psi_inv_pow_;
  std::vector<std::uint64_t> stage_roots_, stage_roots_inv_;
};

}  // namespace dynamiqs::ring
