#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "errors.hpp"
#include "vector.hpp"

namespace smw {

/**
 * @brief Precomputed discrete Fourier transform of a fixed length.
 *
 * Convention: X_k = sum_j x_j exp(-2 pi i jk / n); the inverse carries 1/n.
 * Power-of-two lengths use an iterative radix-2 kernel. Every other length
 * goes through Bluestein's chirp-z reformulation as a circular convolution
 * of power-of-two length, so any n costs O(n log n).
 *
 * A plan is immutable once built; concurrent transforms are safe.
 */
class FftPlan {
public:
    explicit FftPlan(std::size_t n) : n_(n) {
        if (n_ == 0) throw DimensionError("FFT length must be positive");
        if (std::has_single_bit(n_)) {
            radix_len_ = n_;
            build_twiddles();
            return;
        }
        radix_len_ = std::bit_ceil(2 * n_ - 1);
        build_twiddles();

        // chirp w_k = exp(-i pi k^2 / n); k^2 reduced mod 2n keeps the angle small
        chirp_.resize(n_);
        const auto two_n = static_cast<std::uint64_t>(2 * n_);
        for (std::size_t k = 0; k < n_; ++k) {
            const std::uint64_t k2 = (static_cast<std::uint64_t>(k) * k) % two_n;
            const double angle = -std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n_);
            chirp_[k] = std::polar(1.0, angle);
        }
        filter_.assign(radix_len_, Scalar{});
        filter_[0] = std::conj(chirp_[0]);
        for (std::size_t k = 1; k < n_; ++k) {
            filter_[k] = std::conj(chirp_[k]);
            filter_[radix_len_ - k] = std::conj(chirp_[k]);
        }
        radix2(filter_, false);
    }

    std::size_t size() const noexcept { return n_; }

    void forward(std::span<const Scalar> in, std::span<Scalar> out) const { transform(in, out, false); }

    /// Inverse transform, including the 1/n factor.
    void inverse(std::span<const Scalar> in, std::span<Scalar> out) const {
        transform(in, out, true);
        const double scale = 1.0 / static_cast<double>(n_);
        for (auto& z : out) z *= scale;
    }

    Vector forward(const Vector& x) const {
        Vector out(n_);
        forward(x.span(), out.span());
        return out;
    }

    Vector inverse(const Vector& x) const {
        Vector out(n_);
        inverse(x.span(), out.span());
        return out;
    }

private:
    void build_twiddles() {
        twiddles_.resize(radix_len_ / 2);
        for (std::size_t k = 0; k < twiddles_.size(); ++k) {
            const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(radix_len_);
            twiddles_[k] = std::polar(1.0, angle);
        }
    }

    // In-place radix-2 transform of length radix_len_; unnormalized in both directions.
    void radix2(std::vector<Scalar>& a, bool inverse) const {
        const std::size_t m = a.size();
        for (std::size_t i = 1, j = 0; i < m; ++i) {
            std::size_t bit = m >> 1;
            for (; j & bit; bit >>= 1) j ^= bit;
            j ^= bit;
            if (i < j) std::swap(a[i], a[j]);
        }
        for (std::size_t len = 2; len <= m; len <<= 1) {
            const std::size_t half = len / 2;
            const std::size_t stride = m / len;
            for (std::size_t start = 0; start < m; start += len) {
                for (std::size_t k = 0; k < half; ++k) {
                    Scalar w = twiddles_[k * stride];
                    if (inverse) w = std::conj(w);
                    const Scalar u = a[start + k];
                    const Scalar v = a[start + k + half] * w;
                    a[start + k] = u + v;
                    a[start + k + half] = u - v;
                }
            }
        }
    }

    void transform(std::span<const Scalar> in, std::span<Scalar> out, bool inverse) const {
        require_same_size(in.size(), n_, "FFT input");
        require_same_size(out.size(), n_, "FFT output");
        if (chirp_.empty()) {
            std::vector<Scalar> a(in.begin(), in.end());
            radix2(a, inverse);
            std::copy(a.begin(), a.end(), out.begin());
            return;
        }
        // the inverse uses conj(DFT(conj(x)))
        std::vector<Scalar> a(radix_len_, Scalar{});
        for (std::size_t k = 0; k < n_; ++k) {
            const Scalar x = inverse ? std::conj(in[k]) : in[k];
            a[k] = x * chirp_[k];
        }
        radix2(a, false);
        for (std::size_t k = 0; k < radix_len_; ++k) a[k] *= filter_[k];
        radix2(a, true);
        const double scale = 1.0 / static_cast<double>(radix_len_);
        for (std::size_t k = 0; k < n_; ++k) {
            const Scalar y = a[k] * scale * chirp_[k];
            out[k] = inverse ? std::conj(y) : y;
        }
    }

    std::size_t n_;
    std::size_t radix_len_ = 0;
    std::vector<Scalar> twiddles_;
    std::vector<Scalar> chirp_;
    std::vector<Scalar> filter_;
};

inline Vector dft(const Vector& x) { return FftPlan(x.size()).forward(x); }
inline Vector idft(const Vector& x) { return FftPlan(x.size()).inverse(x); }

} // namespace smw
