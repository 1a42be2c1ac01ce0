#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "dynamiqs/bytes.hpp"
#include "dynamiqs/sym/sha256.hpp"

namespace dynamiqs {

// Deterministic random source. Every stream is identified by 32 bytes of seed
// material, so independent child streams can be derived by label without
// consuming the parent.
class SeededRandomSource {
 public:
  explicit SeededRandomSource(std::uint64_t seed) : SeededRandomSource(material_from(seed)) {}

  explicit SeededRandomSource(const Block32& material) : material_(material) {
    std::array<std::uint32_t, 8> words{};
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t b = 0; b < 4; ++b) words[i] |= std::uint32_t{material[4 * i + b]} << (8 * b);
    std::seed_seq seq(words.begin(), words.end());
    engine_.seed(seq);
  }

  SeededRandomSource derive(std::string_view label) const { return derive(as_view(label)); }

  SeededRandomSource derive(ByteView label) const {
    return SeededRandomSource(sym::Sha256().update(material_).update(label).finish());
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform in [0, bound) without modulo bias.
  std::uint64_t uniform_below(std::uint64_t bound) {
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    for (;;) {
      auto v = engine_();
      if (v < limit) return v % bound;
    }
  }

  void fill(std::span<std::uint8_t> out) {
    std::size_t i = 0;
    while (i < out.size()) {
      auto v = engine_();
      for (std::size_t b = 0; b < 8 && i < out.size(); ++b, ++i) out[i] = static_cast<std::uint8_t>(v >> (8 * b));
    }
  }

  Bytes bytes(std::size_t n) {
    Bytes out(n);
    fill(out);
    return out;
  }

  Block32 block32() {
    Block32 out;
    fill(out);
    return out;
  }

  const Block32& material() const { return material_; }

  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return UINT64_MAX; }
  result_type operator()() { return engine_(); }

 private:
  static Block32 material_from(std::uint64_t seed) {
    ByteWriter w;
    w.raw(as_view("dynamiqs-seed"));
    w.u64(seed);
    return sym::sha256(w.bytes());
  }

  Block32 material_;
  std::mt19937_64 engine_;
};

}  // namespace dynamiqs
