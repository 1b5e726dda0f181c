#include "v2csim/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace v2csim {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace

void fft_pow2(std::vector<std::complex<double>>& data, bool inverse) {
    const std::size_t n = data.size();
    if (!is_pow2(n)) throw std::invalid_argument("fft_pow2: size must be a power of two");

    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * M_PI / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = data[i + k];
                const std::complex<double> v = data[i + k + len / 2] * w;
                data[i + k] = u + v;
                data[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse) {
        for (auto& x : data) x /= static_cast<double>(n);
    }
}

std::vector<std::complex<double>> dft(const std::vector<double>& signal) {
    const std::size_t n = signal.size();
    if (n == 0) return {};

    if (is_pow2(n)) {
        std::vector<std::complex<double>> data(n);
        for (std::size_t i = 0; i < n; ++i) data[i] = signal[i];
        fft_pow2(data, false);
        return data;
    }

    // Bluestein: X_k = conj(w_k) * IFFT(FFT(a) .* FFT(b)) with
    // w_j = exp(-i*pi*j^2/n), a_j = x_j*w_j, b_j = conj(w_|j|) padded circularly.
    const std::size_t m = next_pow2(2 * n + 1);
    std::vector<std::complex<double>> w(n);
    for (std::size_t j = 0; j < n; ++j) {
        // j^2 mod 2n keeps the argument small for numerical stability
        const std::size_t j2 = (j * j) % (2 * n);
        const double ang = -M_PI * static_cast<double>(j2) / static_cast<double>(n);
        w[j] = std::complex<double>(std::cos(ang), std::sin(ang));
    }

    std::vector<std::complex<double>> a(m, {0.0, 0.0});
    std::vector<std::complex<double>> b(m, {0.0, 0.0});
    for (std::size_t j = 0; j < n; ++j) a[j] = signal[j] * w[j];
    b[0] = std::conj(w[0]);
    for (std::size_t j = 1; j < n; ++j) {
        b[j] = std::conj(w[j]);
        b[m - j] = b[j];
    }

    fft_pow2(a, false);
    fft_pow2(b, false);
    for (std::size_t j = 0; j < m; ++j) a[j] *= b[j];
    fft_pow2(a, true);

    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * w[k];
    return out;
}

}  // namespace v2csim
