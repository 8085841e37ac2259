#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <complex>
#include <cstddef>
#include <vector>

#include "locc/errors.hpp"
#include "locc/rng.hpp"
#include "locc/schmidt.hpp"

namespace locc {

/// Real and imaginary parts of a d x d coefficient matrix with i.i.d. G(0,1)
/// entries, stored row-major.
struct GaussianSeedMatrix {
  std::size_t dim = 0;
  std::vector<double> real_parts;
  std::vector<double> imag_parts;

  static GaussianSeedMatrix draw(std::size_t dim, RngStream& rng) {
    GaussianSeedMatrix m{dim, std::vector<double>(dim * dim), std::vector<double>(dim * dim)};
    for (std::size_t i = 0; i < dim * dim; ++i) {
      m.real_parts[i] = rng.normal();
      m.imag_parts[i] = rng.normal();
    }
    return m;
  }
};

namespace detail {

// Bounded-size storage keeps small dimensions off the heap.
inline constexpr int kStackDim = 16;

template <typename Matrix>
std::vector<double> gram_eigenvalues(const GaussianSeedMatrix& seed) {
  const auto d = static_cast<Eigen::Index>(seed.dim);
  Matrix c(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const auto k = static_cast<std::size_t>(i * d + j);
      c(i, j) = std::complex<double>(seed.real_parts[k], seed.imag_parts[k]);
    }
  }
  Matrix gram = c * c.adjoint();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(gram, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericFailure("Hermitian eigensolver did not converge");
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

}  // namespace detail

/// Schmidt spectrum of the state sum_ij (a_ij + i b_ij)|i>|j>: normalized
/// eigenvalues of C C^dagger, sorted descending. Eigenvalues down to -1e-12
/// (after normalization) are clamped to zero.
inline SchmidtVector schmidt_from_seed(const GaussianSeedMatrix& seed) {
  if (seed.dim < 1 || seed.real_parts.size() != seed.dim * seed.dim ||
      seed.imag_parts.size() != seed.dim * seed.dim) {
    throw InvalidDimension("Gaussian seed matrix has inconsistent dimensions");
  }
  using SmallMatrix = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor,
                                    detail::kStackDim, detail::kStackDim>;
  std::vector<double> ev = seed.dim <= static_cast<std::size_t>(detail::kStackDim)
                               ? detail::gram_eigenvalues<SmallMatrix>(seed)
                               : detail::gram_eigenvalues<Eigen::MatrixXcd>(seed);
  double sum = 0.0;
  for (const double x : ev) {
    if (!std::isfinite(x)) throw NumericFailure("non-finite eigenvalue in Schmidt extraction");
    sum += x;
  }
  if (!(sum > 0.0) || !std::isfinite(sum)) throw NumericFailure("degenerate coefficient matrix");
  double clamped_sum = 0.0;
  for (double& x : ev) {
    x /= sum;
    if (x < 0.0) {
      if (x < -1e-12) throw NumericFailure("negative eigenvalue beyond clamp tolerance");
      x = 0.0;
    }
    clamped_sum += x;
  }
  for (double& x : ev) x /= clamped_sum;
  std::stable_sort(ev.begin(), ev.end(), std::greater<>{});
  return SchmidtVector::from_sorted_unchecked(std::move(ev));
}

/// Schmidt spectrum of a Haar-random pure state in d ⊗ d.
inline SchmidtVector sample_haar_schmidt(std::size_t dim, RngStream& rng) {
  if (dim < 2) throw InvalidDimension("sample_haar_schmidt needs d >= 2");
  return schmidt_from_seed(GaussianSeedMatrix::draw(dim, rng));
}

}  // namespace locc
