#pragma once

#include <complex>
#include <vector>

namespace v2csim {

// In-place radix-2 FFT; size must be a power of two.
void fft_pow2(std::vector<std::complex<double>>& data, bool inverse);

// DFT of arbitrary length (Bluestein's chirp-z for non power-of-two sizes).
std::vector<std::complex<double>> dft(const std::vector<double>& signal);

}  // namespace v2csim
