#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "../errors.hpp"

namespace qid::detail {

using cplx = std::complex<double>;

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

/// In-place iterative radix-2 transform.  sign=-1 gives sum a_k e^{-2pi i jk/n}
/// (forward), sign=+1 the unnormalised inverse.  n must be a power of two.
inline void fft_inplace(cplx* a, std::size_t n, int sign) {
    require(is_pow2(n), ErrKind::BadInput, "fft length must be a power of two");
    if (n < 2) return;

    // bit reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    static const double kTwoPi = 6.283185307179586476925286766559;
    std::vector<cplx> tw(n / 2);
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * kTwoPi / static_cast<double>(len);
        const std::size_t half = len >> 1;
        for (std::size_t k = 0; k < half; ++k)
            tw[k] = std::polar(1.0, ang * static_cast<double>(k));
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < half; ++k) {
                const cplx u = a[i + k];
                const cplx v = a[i + k + half] * tw[k];
                a[i + k] = u + v;
                a[i + k + half] = u - v;
            }
        }
    }
}

/// Multidimensional transform of a row-major array (last axis fastest).
/// Every extent must be a power of two.
inline void fft_nd(std::vector<cplx>& data, const std::vector<std::size_t>& dims, int sign) {
    std::size_t total = 1;
    for (std::size_t d : dims) total *= d;
    require(data.size() == total, ErrKind::BadInput, "fft_nd: size does not match extents");

    std::size_t stride = 1;  // stride of the current axis, built from the last axis up
    for (std::size_t ax = dims.size(); ax-- > 0;) {
        const std::size_t n = dims[ax];
        std::vector<cplx> line(n);
        const std::size_t block = stride * n;
        for (std::size_t base = 0; base < total; base += block) {
            for (std::size_t off = 0; off < stride; ++off) {
                for (std::size_t i = 0; i < n; ++i) line[i] = data[base + off + i * stride];
                fft_inplace(line.data(), n, sign);
                for (std::size_t i = 0; i < n; ++i) data[base + off + i * stride] = line[i];
            }
        }
        stride = block;
    }
}

}  // namespace qid::detail
