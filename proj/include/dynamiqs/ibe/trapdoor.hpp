#pragma once

#include <cmath>
#include <vector>

#include "dynamiqs/random.hpp"
#include "dynamiqs/ring/anticirculant.hpp"
#include "dynamiqs/ring/gaussian.hpp"

namespace dynamiqs::ibe {

using ring::Matrix;

// The 2N x 2N trapdoor basis of the NTRU lattice {(u, v) : u + v*h = 0 mod q}:
//   [ A(g)  -A(f) ]
//   [ A(G)  -A(F) ]
inline Matrix<std::int64_t> assemble_basis(const std::vector<std::int64_t>& f, const std::vector<std::int64_t>& g,
                                           const std::vector<std::int64_t>& F, const std::vector<std::int64_t>& G) {
  const std::size_t n = f.size();
  const auto Af = ring::anticirculant_matrix(f), Ag = ring::anticirculant_matrix(g);
  const auto AF = ring::anticirculant_matrix(F), AG = ring::anticirculant_matrix(G);
  Matrix<std::int64_t> b(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      b(i, j) = Ag(i, j);
      b(i, n + j) = -Af(i, j);
      b(n + i, j) = AG(i, j);
      b(n + i, n + j) = -AF(i, j);
    }
  }
  return b;
}

// Gram-Schmidt data of a basis and the randomized nearest-plane sampler over it.
class KleinSampler {
 public:
  KleinSampler(Matrix<std::int64_t> basis, double sigma) : basis_(std::move(basis)), sigma_(sigma) {
    const std::size_t dim = basis_.rows();
    gs_ = Matrix<double>(dim, dim);
    gs_norm_sq_.assign(dim, 0);
    std::vector<double> v(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t k = 0; k < dim; ++k) v[k] = static_cast<double>(basis_(i, k));
      // modified Gram-Schmidt
      for (std::size_t j = 0; j < i; ++j) {
        const double* bj = &gs_(j, 0);
        double dot = 0;
        for (std::size_t k = 0; k < dim; ++k) dot += v[k] * bj[k];
        const double mu = dot / gs_norm_sq_[j];
        for (std::size_t k = 0; k < dim; ++k) v[k] -= mu * bj[k];
      }
      double ns = 0;
      for (std::size_t k = 0; k < dim; ++k) {
        gs_(i, k) = v[k];
        ns += v[k] * v[k];
      }
      gs_norm_sq_[i] = ns;
    }
  }

  double max_gs_norm() const {
    double m = 0;
    for (auto v : gs_norm_sq_) m = std::max(m, v);
    return std::sqrt(m);
  }

  const std::vector<double>& gs_norms_sq() const { return gs_norm_sq_; }
  const Matrix<std::int64_t>& basis() const { return basis_; }
  double sigma() const { return sigma_; }

  // Returns a lattice vector distributed close to a discrete Gaussian of
  // width sigma centered at `target`.
  std::vector<std::int64_t> sample_near(const std::vector<double>& target, SeededRandomSource& rng) const {
    const std::size_t dim = basis_.rows();
    std::vector<double> c(target);
    std::vector<std::int64_t> v(dim, 0);
    for (std::size_t ii = dim; ii-- > 0;) {
      const double* bi = &gs_(ii, 0);
      double dot = 0;
      for (std::size_t k = 0; k < dim; ++k) dot += c[k] * bi[k];
      const double center = dot / gs_norm_sq_[ii];
      const double width = sigma_ / std::sqrt(gs_norm_sq_[ii]);
      const std::int64_t z = ring::DiscreteGaussian(width, center)(rng);
      if (z == 0) continue;
      const auto row = basis_.row(ii);
      for (std::size_t k = 0; k < dim; ++k) {
        c[k] -= static_cast<double>(z * row[k]);
        v[k] += z * row[k];
      }
    }
    return v;
  }

 private:
  Matrix<std::int64_t> basis_;
  double sigma_;
  Matrix<double> gs_;
  std::vector<double> gs_norm_sq_;
};

}  // namespace dynamiqs::ibe
