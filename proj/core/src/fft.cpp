#include "whirlbench/fft.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "whirlbench/error.hpp"

namespace whirlbench::fft {

void transform(std::span<Complex> data, bool inverse) {
    const std::size_t n = data.size();
    if (!is_power_of_two(n)) throw ValidationError("FFT length must be a power of two");

    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }

    // Twiddles from direct cos/sin per index, not a running product, so
    // rounding error does not grow with the transform length. Stage len reads
    // every (n / len)-th entry.
    const double sign = inverse ? 1.0 : -1.0;
    std::vector<Complex> twiddle(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
        const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
        twiddle[k] = Complex(std::cos(angle), std::sin(angle));
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        const std::size_t stride = n / len;
        for (std::size_t start = 0; start < n; start += len)
            for (std::size_t k = 0; k < half; ++k) {
                const Complex w = twiddle[k * stride];
                const Complex x = data[start + k + half];
                // Written out: operator* on std::complex carries NaN recovery
                // that dominates the butterfly cost.
                const Complex v(x.real() * w.real() - x.imag() * w.imag(), x.real() * w.imag() + x.imag() * w.real());
                const Complex u = data[start + k];
                data[start + k] = u + v;
                data[start + k + half] = u - v;
            }
    }
    if (inverse) {
        const double scale = 1.0 / static_cast<double>(n);
        for (auto& x : data) x *= scale;
    }
}

std::vector<Complex> forward_real(std::span<const double> samples) {
    std::vector<Complex> buffer(samples.begin(), samples.end());
    transform(buffer);
    buffer.resize(samples.size() / 2 + 1);
    return buffer;
}

std::vector<double> inverse_real(std::span<const Complex> bins, std::size_t length) {
    if (!is_power_of_two(length) || bins.size() != length / 2 + 1)
        throw ValidationError("inverse_real needs N/2 + 1 bins for a power-of-two N");
    std::vector<Complex> full(length);
    full[0] = bins[0].real();
    for (std::size_t k = 1; k < length / 2; ++k) {
        full[k] = bins[k];
        full[length - k] = std::conj(bins[k]);
    }
    if (length > 1) full[length / 2] = bins[length / 2].real();
    transform(full, true);
    std::vector<double> out(length);
    for (std::size_t i = 0; i < length; ++i) out[i] = full[i].real();
    return out;
}

}  // namespace whirlbench::fft
