#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace smw {

using Scalar = std::complex<double>;

enum class NormKind { two, inf };

/**
 * @brief Dense complex vector of fixed length.
 *
 * Real data embeds with zero imaginary part. The length is set at
 * construction; there is no push_back/resize.
 */
class Vector {
public:
    Vector() = default;
    explicit Vector(std::size_t n, Scalar fill = {}) : data_(n, fill) {}
    Vector(std::initializer_list<Scalar> values) : data_(values) {}
    explicit Vector(std::vector<Scalar> values) : data_(std::move(values)) {}

    static Vector from_real(std::span<const double> values) {
        Vector v(values.size());
        std::copy(values.begin(), values.end(), v.data_.begin());
        return v;
    }

    static Vector ones(std::size_t n) { return Vector(n, Scalar(1.0)); }

    static Vector unit(std::size_t n, std::size_t k) {
        Vector v(n);
        v[k] = 1.0;
        return v;
    }

    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    Scalar& operator[](std::size_t i) noexcept { return data_[i]; }
    const Scalar& operator[](std::size_t i) const noexcept { return data_[i]; }

    Scalar* data() noexcept { return data_.data(); }
    const Scalar* data() const noexcept { return data_.data(); }

    auto begin() noexcept { return data_.begin(); }
    auto end() noexcept { return data_.end(); }
    auto begin() const noexcept { return data_.begin(); }
    auto end() const noexcept { return data_.end(); }

    std::span<Scalar> span() noexcept { return data_; }
    std::span<const Scalar> span() const noexcept { return data_; }

    const std::vector<Scalar>& values() const noexcept { return data_; }

    bool all_finite() const noexcept {
        return std::all_of(data_.begin(), data_.end(), [](const Scalar& z) {
            return std::isfinite(z.real()) && std::isfinite(z.imag());
        });
    }

    friend bool operator==(const Vector&, const Vector&) = default;

private:
    std::vector<Scalar> data_;
};

inline void require_same_size(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw DimensionError(std::string(what) + ": length " + std::to_string(a) +
                             " does not match " + std::to_string(b));
    }
}

inline double norm(std::span<const Scalar> x, NormKind kind = NormKind::two) {
    if (kind == NormKind::inf) {
        double m = 0.0;
        for (const auto& z : x) m = std::max(m, std::abs(z));
        return m;
    }
    // scaled sum of squares, avoids overflow for huge entries
    double scale = 0.0;
    double ssq = 1.0;
    for (const auto& z : x) {
        for (double part : {z.real(), z.imag()}) {
            if (part == 0.0) continue;
            const double a = std::abs(part);
            if (scale < a) {
                ssq = 1.0 + ssq * (scale / a) * (scale / a);
                scale = a;
            } else {
                ssq += (a / scale) * (a / scale);
            }
        }
    }
    return scale * std::sqrt(ssq);
}

inline double norm(const Vector& x, NormKind kind = NormKind::two) { return norm(x.span(), kind); }

/// Bilinear product x^T y (no conjugation), as in v^T M^{-1} u.
inline Scalar dot(const Vector& x, const Vector& y) {
    require_same_size(x.size(), y.size(), "dot");
    Scalar s{};
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

/// Hermitian inner product x^H y.
inline Scalar dotc(const Vector& x, const Vector& y) {
    require_same_size(x.size(), y.size(), "dotc");
    Scalar s{};
    for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
    return s;
}

inline Vector operator+(const Vector& x, const Vector& y) {
    require_same_size(x.size(), y.size(), "vector add");
    Vector r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] + y[i];
    return r;
}

inline Vector operator-(const Vector& x, const Vector& y) {
    require_same_size(x.size(), y.size(), "vector subtract");
    Vector r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] - y[i];
    return r;
}

inline Vector operator*(Scalar a, const Vector& x) {
    Vector r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = a * x[i];
    return r;
}

/// y += a * x
inline void axpy(Scalar a, const Vector& x, Vector& y) {
    require_same_size(x.size(), y.size(), "axpy");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

/// Concatenate two vectors (stacked block unknowns).
inline Vector stack(const Vector& top, const Vector& bottom) {
    Vector r(top.size() + bottom.size());
    std::copy(top.begin(), top.end(), r.begin());
    std::copy(bottom.begin(), bottom.end(), r.begin() + static_cast<std::ptrdiff_t>(top.size()));
    return r;
}

inline Vector slice(const Vector& x, std::size_t offset, std::size_t count) {
    if (offset + count > x.size()) throw DimensionError("slice out of range");
    Vector r(count);
    std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(offset), count, r.begin());
    return r;
}

} // namespace smw
