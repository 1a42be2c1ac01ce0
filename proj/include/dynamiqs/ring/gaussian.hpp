#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "dynamiqs/random.hpp"
#include "dynamiqs/ring/integer_poly.hpp"

namespace dynamiqs::ring {

// Discrete Gaussian over Z with pmf proportional to exp(-(x - c)^2 / (2 sigma^2)),
// sampled by inverting a cumulative table truncated at 12 sigma.
class DiscreteGaussian {
 public:
  static constexpr double kTailCut = 12.0;

  DiscreteGaussian(double sigma, double center = 0.0) : center_(center) {
    const double radius = std::max(1.0, std::ceil(kTailCut * sigma));
    lo_ = static_cast<std::int64_t>(std::floor(center - radius));
    const auto hi = static_cast<std::int64_t>(std::ceil(center + radius));
    cdf_.reserve(static_cast<std::size_t>(hi - lo_ + 1));
    const double denom = 2.0 * sigma * sigma;
    double acc = 0;
    for (std::int64_t x = lo_; x <= hi; ++x) {
      const double d = static_cast<double>(x) - center;
      acc += std::exp(-d * d / denom);
      cdf_.push_back(acc);
    }
    for (auto& v : cdf_) v /= acc;
  }

  std::int64_t operator()(SeededRandomSource& rng) const {
    const double u = rng.uniform01();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) --it;
    return lo_ + static_cast<std::int64_t>(it - cdf_.begin());
  }

  // Normalized probability of x under the truncated table.
  double pmf(std::int64_t x) const {
    if (x < lo_ || x >= lo_ + static_cast<std::int64_t>(cdf_.size())) return 0.0;
    const auto i = static_cast<std::size_t>(x - lo_);
    return i == 0 ? cdf_[0] : cdf_[i] - cdf_[i - 1];
  }

  std::int64_t support_min() const { return lo_; }
  std::int64_t support_max() const { return lo_ + static_cast<std::int64_t>(cdf_.size()) - 1; }

 private:
  double center_;
  std::int64_t lo_ = 0;
  std::vector<double> cdf_;
};

inline std::vector<std::int64_t> sample_gaussian_vector(std::size_t n, double sigma, SeededRandomSource& rng) {
  if (!(sigma > 0)) throw InvalidParams("sigma must be positive");
  DiscreteGaussian dg(sigma);
  std::vector<std::int64_t> out(n);
  for (auto& v : out) v = dg(rng);
  return out;
}

inline IntegerPolynomial sample_gaussian_poly(const RingParams& params, double sigma, SeededRandomSource& rng) {
  return IntegerPolynomial::from_signed(sample_gaussian_vector(params.n, sigma, rng));
}

// Uniform ternary polynomial, used for the encryption randomness r, e1, e2.
inline RingElement sample_ternary(const RingParams& params, SeededRandomSource& rng) {
  std::vector<std::int64_t> v(params.n);
  for (auto& c : v) c = static_cast<std::int64_t>(rng.uniform_below(3)) - 1;
  return RingElement::from_signed(params, v);
}

}  // namespace dynamiqs::ring
