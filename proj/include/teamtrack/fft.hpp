#pragma once

#include <complex>
#include <vector>

namespace teamtrack::detail {

// In-place 2D radix-2 FFT on an n x n row-major grid; n must be a power of two.
// The inverse transform includes the 1/n^2 scaling.
void fft2(std::vector<std::complex<double>>& a, int n, bool inverse);

}  // namespace teamtrack::detail
