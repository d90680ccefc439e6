#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace whirlbench::fft {

using Complex = std::complex<double>;

constexpr bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// In-place iterative radix-2 transform, X_k = sum x_n exp(-2 pi i k n / N).
/// The inverse carries the 1/N factor. Throws unless size is a power of two.
void transform(std::span<Complex> data, bool inverse = false);

/// Bins 0..N/2 of a real sequence.
std::vector<Complex> forward_real(std::span<const double> samples);

/// Inverse of forward_real; the imaginary parts of bins 0 and N/2 are ignored.
std::vector<double> inverse_real(std::span<const Complex> bins, std::size_t length);

}  // namespace whirlbench::fft
