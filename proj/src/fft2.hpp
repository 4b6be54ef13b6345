#pragma once

#include <complex>

namespace lqg::detail {

/// In-place 2D complex FFT on an n x n row-major array, n a power of two.
/// Unnormalized: forward uses e^{-i...}, inverse uses e^{+i...} and does NOT
/// divide by n^2. FFTW-backed; plans are cached and calls are thread-safe.
void fft2(std::complex<double>* data, int n, bool inverse);

}  // namespace lqg::detail
