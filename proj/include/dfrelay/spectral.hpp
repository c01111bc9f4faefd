#pragma once

// Block transforms with the convention used throughout the library:
//   forward  X[l] = sum_m x[m] exp(-j 2 pi m l / M)          (no scaling)
//   inverse  x[m] = (1/M) sum_l X[l] exp(+j 2 pi m l / M)
// Block lengths must be powers of two.

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <unsupported/Eigen/FFT>

#include "dfrelay/types.hpp"

namespace dfrelay::spectral {

template <typename Scalar>
using Block = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

namespace detail {

inline void require_block_length(Index m, const char* what) {
  if (m < 1)
    throw InvalidLength(std::string(what) + ": empty block");
  if (!is_power_of_two(m))
    throw InvalidLength(std::string(what) + ": block length " + std::to_string(m) +
                        " is not a power of two");
}

template <typename Scalar>
Eigen::FFT<Scalar>& engine() {
  // kissfft plans are cached inside the engine, so one per thread.
  thread_local Eigen::FFT<Scalar> fft;
  return fft;
}

} // namespace detail

template <typename Derived>
Block<typename Derived::Scalar::value_type> dft(const Eigen::MatrixBase<Derived>& block) {
  using Scalar = typename Derived::Scalar::value_type;
  detail::require_block_length(block.size(), "dft");
  const Block<Scalar> in = block;
  if (in.size() == 1) // kissfft cannot plan a length-1 transform
    return in;
  Block<Scalar> out(in.size());
  detail::engine<Scalar>().fwd(out, in);
  return out;
}

template <typename Derived>
Block<typename Derived::Scalar::value_type> idft(const Eigen::MatrixBase<Derived>& spectrum) {
  using Scalar = typename Derived::Scalar::value_type;
  detail::require_block_length(spectrum.size(), "idft");
  const Block<Scalar> in = spectrum;
  if (in.size() == 1)
    return in;
  Block<Scalar> out(in.size());
  detail::engine<Scalar>().inv(out, in); // applies the 1/M factor
  return out;
}

// out[m] = sum_k a[k] b[(m - k) mod M], evaluated directly.
template <typename DerivedA, typename DerivedB>
Block<typename DerivedA::Scalar::value_type> circular_convolve(const Eigen::MatrixBase<DerivedA>& a,
                                                               const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar::value_type;
  const Index m = a.size();
  if (m < 1 || b.size() != m)
    throw InvalidLength("circular_convolve: lengths " + std::to_string(a.size()) + " and " +
                        std::to_string(b.size()));
  Block<Scalar> out = Block<Scalar>::Zero(m);
  for (Index k = 0; k < m; ++k) {
    if (a[k] == std::complex<Scalar>(0))
      continue;
    for (Index n = 0; n < m; ++n)
      out[n] += a[k] * b[(n - k + m) % m];
  }
  return out;
}

} // namespace dfrelay::spectral
