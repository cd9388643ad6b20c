#pragma once

#include <complex>
#include <span>
#include <vector>

namespace levyts::fft {

using cd = std::complex<double>;

/// In-place complex DFT. forward: X_k = sum x_j exp(-2 pi i jk/n); inverse is unnormalized.
void transform(std::span<cd> data, bool forward);

/// Smallest power of two >= n.
std::size_t next_pow2(std::size_t n);

/// Causal linear convolution y_i = sum_{j<=i} h_{i-j} x_j, i < x.size().
std::vector<double> causal_convolve(std::span<const double> h, std::span<const double> x);

} // namespace levyts::fft
