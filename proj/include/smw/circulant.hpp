#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "csr.hpp"
#include "dense.hpp"
#include "errors.hpp"
#include "fft.hpp"
#include "vector.hpp"

namespace smw {

/**
 * @brief Band coefficients of a circulant, keyed by column offset j - i.
 *
 * Offset 0 is the diagonal, -1 the sub-diagonal, +1 the super-diagonal.
 */
struct Stencil {
    std::vector<long> offsets;
    std::vector<Scalar> coefficients;

    /// Odd-length row listing c_{-p}, ..., c_0, ..., c_p (leftmost band first).
    static Stencil centered(std::span<const Scalar> row) {
        if (row.size() % 2 == 0) throw ConfigError("centered stencil needs an odd number of entries");
        const auto p = static_cast<long>(row.size() / 2);
        Stencil s;
        for (std::size_t k = 0; k < row.size(); ++k) {
            s.offsets.push_back(static_cast<long>(k) - p);
            s.coefficients.push_back(row[k]);
        }
        return s;
    }

    static Stencil centered(std::initializer_list<Scalar> row) {
        return centered(std::span<const Scalar>(row.begin(), row.size()));
    }

    long max_abs_offset() const {
        long m = 0;
        for (long o : offsets) m = std::max(m, std::abs(o));
        return m;
    }
};

/**
 * @brief Circulant matrix M = F D F^{-1}, stored by its first column.
 *
 * Entry (i, j) equals first_column[(i - j) mod n], so multiplication is
 * circular convolution with the first column and the eigenvalues are the
 * DFT of the first column. Eigenvalues and the FFT plan are computed once at
 * construction; the object is immutable afterwards.
 */
class Circulant {
public:
    /// Solves refuse eigenvalues below this fraction of the largest one.
    static constexpr double singular_threshold = 1e-12;

    explicit Circulant(Vector first_column)
        : first_column_(std::move(first_column)),
          plan_(std::make_shared<const FftPlan>(first_column_.size())),
          eigenvalues_(plan_->forward(first_column_)) {}

    static Circulant from_first_row(const Vector& row) {
        const std::size_t n = row.size();
        Vector col(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = row[(n - i) % n];
        return Circulant(std::move(col));
    }

    static Circulant identity(std::size_t n, Scalar a = 1.0) {
        Vector col(n);
        col[0] = a;
        return Circulant(std::move(col));
    }

    std::size_t size() const noexcept { return first_column_.size(); }
    const Vector& first_column() const noexcept { return first_column_; }
    const Vector& eigenvalues() const noexcept { return eigenvalues_; }
    const FftPlan& plan() const noexcept { return *plan_; }

    Vector first_row() const {
        const std::size_t n = size();
        Vector row(n);
        for (std::size_t j = 0; j < n; ++j) row[j] = first_column_[(n - j) % n];
        return row;
    }

    Scalar entry(std::size_t i, std::size_t j) const {
        const std::size_t n = size();
        return first_column_[(i + n - j) % n];
    }

    bool is_invertible() const noexcept { return !find_singular_index().has_value(); }

    /// Smallest Fourier index whose eigenvalue fails the relative singularity test.
    std::optional<std::size_t> find_singular_index() const noexcept {
        double largest = 0.0;
        for (const auto& z : eigenvalues_) largest = std::max(largest, std::abs(z));
        const double floor = singular_threshold * largest;
        for (std::size_t k = 0; k < eigenvalues_.size(); ++k)
            if (!(std::abs(eigenvalues_[k]) > floor)) return k;
        return std::nullopt;
    }

    Vector apply(const Vector& x) const {
        require_same_size(x.size(), size(), "circulant_matvec");
        Vector spectrum = plan_->forward(x);
        for (std::size_t k = 0; k < size(); ++k) spectrum[k] *= eigenvalues_[k];
        return plan_->inverse(spectrum);
    }

    Vector solve(const Vector& b) const {
        require_same_size(b.size(), size(), "circulant_solve");
        if (const auto k = find_singular_index()) {
            throw SingularMatrixError("circulant is singular: eigenvalue at Fourier index " + std::to_string(*k) +
                                          " is zero to working precision",
                                      *k);
        }
        Vector spectrum = plan_->forward(b);
        for (std::size_t k = 0; k < size(); ++k) spectrum[k] /= eigenvalues_[k];
        return plan_->inverse(spectrum);
    }

    DenseMatrix densify(std::size_t cap = default_small_cap) const {
        if (size() > cap) {
            throw CapacityError("densify: circulant of size " + std::to_string(size()) + " exceeds cap " +
                                std::to_string(cap));
        }
        DenseMatrix d(size(), size());
        for (std::size_t i = 0; i < size(); ++i)
            for (std::size_t j = 0; j < size(); ++j) d(i, j) = entry(i, j);
        return d;
    }

    /// Sparse copy holding one band per nonzero of the first column.
    CsrMatrix to_csr() const {
        const std::size_t n = size();
        std::vector<Triplet> t;
        for (std::size_t d = 0; d < n; ++d) {
            if (first_column_[d] == Scalar{}) continue;
            for (std::size_t j = 0; j < n; ++j) t.push_back({(j + d) % n, j, first_column_[d]});
        }
        return CsrMatrix::from_triplets(n, n, std::move(t));
    }

private:
    Vector first_column_;
    std::shared_ptr<const FftPlan> plan_;
    Vector eigenvalues_;
};

inline Circulant circulant_from_stencil(std::size_t n, const Stencil& s) {
    if (s.offsets.size() != s.coefficients.size()) throw ConfigError("stencil offsets and coefficients differ in length");
    if (n == 0 || static_cast<long>(n) <= 2 * s.max_abs_offset()) {
        throw DimensionError("circulant_from_stencil: n = " + std::to_string(n) + " must exceed twice the stencil "
                             "half-width " + std::to_string(s.max_abs_offset()));
    }
    Vector col(n);
    std::vector<bool> used(n, false);
    const auto ln = static_cast<long>(n);
    for (std::size_t k = 0; k < s.offsets.size(); ++k) {
        // entry (i, i + offset) lives at first_column[(-offset) mod n]
        const auto idx = static_cast<std::size_t>(((-s.offsets[k]) % ln + ln) % ln);
        if (used[idx]) throw ConfigError("stencil offsets collide modulo n at offset " + std::to_string(s.offsets[k]));
        used[idx] = true;
        col[idx] = s.coefficients[k];
    }
    return Circulant(std::move(col));
}

inline Vector circulant_matvec(const Circulant& c, const Vector& x) { return c.apply(x); }
inline Vector circulant_solve(const Circulant& c, const Vector& b) { return c.solve(b); }
inline DenseMatrix densify(const Circulant& c, std::size_t cap = default_small_cap) { return c.densify(cap); }

/// Product of two circulants; its eigenvalues are the pointwise products.
inline Circulant operator*(const Circulant& a, const Circulant& b) {
    require_same_size(a.size(), b.size(), "circulant product");
    Vector ev(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) ev[k] = a.eigenvalues()[k] * b.eigenvalues()[k];
    return Circulant(a.plan().inverse(ev));
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n\"'");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n\"'");
    return s.substr(first, last - first + 1);
}

inline double parse_double(std::string_view token) {
    token = trim(token);
    double v = 0.0;
    const auto* begin = token.data();
    const auto* end = token.data() + token.size();
    if (!token.empty() && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end) throw ConfigError("invalid number '" + std::string(token) + "'");
    return v;
}

} // namespace detail

/// Parses "p/q" or a decimal; p/q yields the correctly rounded quotient.
inline double parse_rational(std::string_view token) {
    token = detail::trim(token);
    if (const auto slash = token.find('/'); slash != std::string_view::npos) {
        const double p = detail::parse_double(token.substr(0, slash));
        const double q = detail::parse_double(token.substr(slash + 1));
        if (q == 0.0) throw ConfigError("zero denominator in '" + std::string(token) + "'");
        return p / q;
    }
    return detail::parse_double(token);
}

/// Comma-separated list, optionally bracketed: "[-5/6, 8/3, -5/6]" or "4,3,2,1".
inline std::vector<double> parse_number_list(std::string_view text) {
    text = detail::trim(text);
    if (const auto eq = text.find('='); eq != std::string_view::npos) text = detail::trim(text.substr(eq + 1));
    if (!text.empty() && text.front() == '[') {
        if (text.back() != ']') throw ConfigError("unterminated '[' in number list");
        text = text.substr(1, text.size() - 2);
    }
    std::vector<double> out;
    while (true) {
        const auto comma = text.find(',');
        const auto token = detail::trim(text.substr(0, comma));
        if (token.empty()) throw ConfigError("empty entry in number list");
        out.push_back(parse_rational(token));
        if (comma == std::string_view::npos) break;
        text = text.substr(comma + 1);
    }
    return out;
}

/**
 * Parses the circulant literal `circulant = [a, b, c]` (odd length, centre on
 * the diagonal). The `circulant =` prefix is optional; entries may be `p/q`.
 */
inline Stencil parse_stencil_literal(std::string_view text) {
    const auto values = parse_number_list(text);
    std::vector<Scalar> row(values.begin(), values.end());
    return Stencil::centered(row);
}

} // namespace smw
