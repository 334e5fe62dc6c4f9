#include "teamtrack/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace teamtrack::detail {

namespace {

void fft1(std::complex<double>* a, int n, int stride, bool inverse,
          std::vector<std::complex<double>>& scratch) {
    // gather strided elements, run an iterative radix-2 transform, scatter back
    for (int i = 0; i < n; ++i) scratch[i] = a[static_cast<std::size_t>(i) * stride];

    for (int i = 1, j = 0; i < n; ++i) {  // bit reversal
        int bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(scratch[i], scratch[j]);
    }
    for (int len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * std::numbers::pi / len;
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (int i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (int k = 0; k < len / 2; ++k) {
                const std::complex<double> u = scratch[i + k];
                const std::complex<double> v = scratch[i + k + len / 2] * w;
                scratch[i + k] = u + v;
                scratch[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i) * stride] = scratch[i];
}

}  // namespace

void fft2(std::vector<std::complex<double>>& a, int n, bool inverse) {
    if (n <= 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft2: size must be a power of two");
    std::vector<std::complex<double>> scratch(n);
    for (int row = 0; row < n; ++row)
        fft1(a.data() + static_cast<std::size_t>(row) * n, n, 1, inverse, scratch);
    for (int col = 0; col < n; ++col) fft1(a.data() + col, n, n, inverse, scratch);
    if (inverse) {
        const double scale = 1.0 / (static_cast<double>(n) * n);
        for (auto& v : a) v *= scale;
    }
}

}  // namespace teamtrack::detail
