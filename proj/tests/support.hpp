#pragma once

// Random generators and independent oracles shared by the test binaries.

#include <smw/smw.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace smw_test {

using smw::DenseMatrix;
using smw::Scalar;
using smw::Vector;

inline std::mt19937 rng(std::uint32_t seed) { return std::mt19937(seed); }

inline double uniform(std::mt19937& g, double lo = -1.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline std::size_t uniform_index(std::mt19937& g, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(g);
}

inline Vector random_vector(std::mt19937& g, std::size_t n, bool complex = false) {
    Vector v(n);
    for (auto& z : v) z = Scalar(uniform(g), complex ? uniform(g) : 0.0);
    return v;
}

inline DenseMatrix random_dense(std::mt19937& g, std::size_t rows, std::size_t cols, bool complex = false) {
    DenseMatrix a(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) a(i, j) = Scalar(uniform(g), complex ? uniform(g) : 0.0);
    return a;
}

/// Random matrix pushed towards diagonal dominance so its condition number stays small.
inline DenseMatrix random_well_conditioned(std::mt19937& g, std::size_t n, bool complex = false) {
    DenseMatrix a = random_dense(g, n, n, complex);
    for (std::size_t i = 0; i < n; ++i) a(i, i) += Scalar(static_cast<double>(n) + 1.0);
    return a;
}

inline std::vector<smw::Triplet> random_triplets(std::mt19937& g, std::size_t rows, std::size_t cols,
                                                 double density) {
    std::vector<smw::Triplet> t;
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            if (uniform(g, 0.0, 1.0) < density) t.push_back({i, j, Scalar(uniform(g), uniform(g))});
    return t;
}

/// O(n^2) DFT straight from the definition X_k = sum_j x_j exp(-2 pi i jk / n).
inline Vector naive_dft(const Vector& x) {
    const std::size_t n = x.size();
    Vector out(n);
    for (std::size_t k = 0; k < n; ++k) {
        Scalar s{};
        for (std::size_t j = 0; j < n; ++j) {
            const double angle = -2.0 * std::numbers::pi * static_cast<double>((j * k) % n) / static_cast<double>(n);
            s += x[j] * std::polar(1.0, angle);
        }
        out[k] = s;
    }
    return out;
}

/// Dense circulant from its first column, entry (i, j) = c[(i - j) mod n].
inline DenseMatrix circulant_oracle(const Vector& c) {
    const std::size_t n = c.size();
    DenseMatrix d(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) d(i, j) = c[(i + n - j) % n];
    return d;
}

inline double max_diff(const Vector& a, const Vector& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double rel_diff(const Vector& a, const Vector& b) {
    return smw::norm(a - b) / std::max(smw::norm(b), 1e-300);
}

} // namespace smw_test
