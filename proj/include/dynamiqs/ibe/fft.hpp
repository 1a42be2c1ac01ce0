#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "dynamiqs/ring/integer_poly.hpp"

namespace dynamiqs::ibe::fft {

using Complex = std::complex<double>;
using Spectrum = std::vector<Complex>;

namespace detail {

inline void dft_in_place(Spectrum& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? -2.0 : 2.0) * std::numbers::pi / static_cast<double>(len);
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t j = 0; j < len / 2; ++j) {
        const Complex w = std::polar(1.0, ang * static_cast<double>(j));
        const Complex u = a[i + j];
        const Complex v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
      }
    }
  }
}

}  // namespace detail

// Evaluations at the N complex roots of x^N + 1, exp(i pi (2k+1) / N).
inline Spectrum forward(const std::vector<double>& p) {
  const std::size_t n = p.size();
  Spectrum a(n);
  for (std::size_t j = 0; j < n; ++j)
    a[j] = p[j] * std::polar(1.0, std::numbers::pi * static_cast<double>(j) / static_cast<double>(n));
  detail::dft_in_place(a, false);
  return a;
}

inline std::vector<double> inverse(Spectrum a) {
  const std::size_t n = a.size();
  detail::dft_in_place(a, true);
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j)
    out[j] = (a[j] * std::polar(1.0, -std::numbers::pi * static_cast<double>(j) / static_cast<double>(n))).real() /
             static_cast<double>(n);
  return out;
}

inline Spectrum forward(const ring::IntegerPolynomial& p) {
  std::vector<double> v(p.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = p[i].convert_to<double>();
  return forward(v);
}

}  // namespace dynamiqs::ibe::fft
