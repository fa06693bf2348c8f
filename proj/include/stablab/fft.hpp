#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace stablab::fft {

// In-place radix-2 complex FFT, n a power of two.
// sign = -1: forward (e^{-2pi i jk/n}), sign = +1: unscaled inverse.
void transform(std::complex<double>* data, std::size_t n, int sign);

// Apply the 1-D transform along every axis of a d-dimensional cube with n
// points per axis (row-major layout). The inverse (+1) is scaled by n^{-d},
// so forward followed by inverse is the identity.
void forward_nd(std::vector<std::complex<double>>& values, int dim, std::size_t n);
void inverse_nd(std::vector<std::complex<double>>& values, int dim, std::size_t n);

} // namespace stablab::fft
