#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace unitmark::fft {

/// In-order complex DFT of size n (any power of two), forward (sign -1).
/// Backed by FFTW; plans are cached per size and safe to execute
/// concurrently on distinct buffers.
std::vector<std::complex<double>> forward(const std::vector<std::complex<double>>& in);

/// Unnormalized inverse complex DFT (sign +1).
std::vector<std::complex<double>> inverse(const std::vector<std::complex<double>>& in);

/// Linear convolution of a and b via zero-padded FFTs.
/// Result length is a.size() + b.size() - 1.
std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b);

std::size_t next_pow2(std::size_t n);

} // namespace unitmark::fft
