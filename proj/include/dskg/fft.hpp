#pragma once

// Iterative radix-2 complex FFT.  Grid sizes are powers of two by invariant,
// so no other radices are needed.

#include <complex>
#include <numbers>
#include <vector>

#include "dskg/errors.hpp"

namespace dskg {

namespace detail {

inline void fft_radix2(std::complex<double>* a, std::size_t n, bool inverse) {
    if (n == 0 || (n & (n - 1)) != 0)
        throw numerical_error("fft: length must be a power of two");
    // bit reversal
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        double ang = 2.0 * std::numbers::pi / static_cast<double>(len);
        if (!inverse) ang = -ang;
        std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                std::complex<double> u = a[i + k];
                std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

}  // namespace detail

// values -> Fourier-series coefficients of the band-limited interpolant:
// c_k = (1/N) sum_j f_j e^{-ik x_j}, frequencies in FFT order.
inline void fft_forward(std::vector<std::complex<double>>& a) {
    detail::fft_radix2(a.data(), a.size(), false);
    const double inv = 1.0 / static_cast<double>(a.size());
    for (auto& v : a) v *= inv;
}

// coefficients -> values: f_j = sum_k c_k e^{ik x_j}
inline void fft_inverse(std::vector<std::complex<double>>& a) {
    detail::fft_radix2(a.data(), a.size(), true);
}

// 2-D transforms on row-major [ny][nx] data, same normalization per axis.
inline void fft_forward_2d(std::vector<std::complex<double>>& a, std::size_t ny,
                           std::size_t nx) {
    if (a.size() != nx * ny) throw numerical_error("fft2d: size mismatch");
    for (std::size_t y = 0; y < ny; ++y)
        detail::fft_radix2(a.data() + y * nx, nx, false);
    std::vector<std::complex<double>> col(ny);
    for (std::size_t x = 0; x < nx; ++x) {
        for (std::size_t y = 0; y < ny; ++y) col[y] = a[y * nx + x];
        detail::fft_radix2(col.data(), ny, false);
        for (std::size_t y = 0; y < ny; ++y) a[y * nx + x] = col[y];
    }
    const double inv = 1.0 / static_cast<double>(nx * ny);
    for (auto& v : a) v *= inv;
}

inline void fft_inverse_2d(std::vector<std::complex<double>>& a, std::size_t ny,
                           std::size_t nx) {
    if (a.size() != nx * ny) throw numerical_error("fft2d: size mismatch");
    for (std::size_t y = 0; y < ny; ++y)
        detail::fft_radix2(a.data() + y * nx, nx, true);
    std::vector<std::complex<double>> col(ny);
    for (std::size_t x = 0; x < nx; ++x) {
        for (std::size_t y = 0; y < ny; ++y) col[y] = a[y * nx + x];
        detail::fft_radix2(col.data(), ny, true);
        for (std::size_t y = 0; y < ny; ++y) a[y * nx + x] = col[y];
    }
}

}  // namespace dskg
