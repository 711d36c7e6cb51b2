#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace ambiup {

// In-place radix-2 FFT.  Size must be a power of two.  The inverse transform
// includes the 1/N factor.
void fft_inplace(std::vector<std::complex<double>>& x, bool inverse);

std::size_t next_pow2(std::size_t n);

}  // namespace ambiup
