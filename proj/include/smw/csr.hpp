#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "dense.hpp"
#include "errors.hpp"
#include "vector.hpp"

namespace smw {

struct Triplet {
    std::size_t row;
    std::size_t col;
    Scalar value;
};

/**
 * @brief Compressed sparse row matrix.
 *
 * Column indices are strictly increasing inside each row, so duplicates are
 * rejected at construction. Use CsrMatrix::from_triplets to coalesce.
 */
class CsrMatrix {
public:
    CsrMatrix() : row_offsets_{0} {}

    CsrMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_offsets,
              std::vector<std::size_t> col_indices, std::vector<Scalar> values)
        : rows_(rows),
          cols_(cols),
          row_offsets_(std::move(row_offsets)),
          col_indices_(std::move(col_indices)),
          values_(std::move(values)) {
        validate();
    }

    /// Sums duplicate (row, col) pairs. Explicit zeros are kept unless drop_zeros.
    static CsrMatrix from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets,
                                   bool drop_zeros = false) {
        for (const auto& t : triplets) {
            if (t.row >= rows || t.col >= cols) {
                throw DimensionError("triplet (" + std::to_string(t.row) + ", " + std::to_string(t.col) +
                                     ") outside " + std::to_string(rows) + "x" + std::to_string(cols));
            }
        }
        std::sort(triplets.begin(), triplets.end(),
                  [](const Triplet& a, const Triplet& b) { return std::tie(a.row, a.col) < std::tie(b.row, b.col); });

        std::vector<std::size_t> offsets(rows + 1, 0);
        std::vector<std::size_t> cols_out;
        std::vector<Scalar> vals_out;
        cols_out.reserve(triplets.size());
        vals_out.reserve(triplets.size());
        std::size_t i = 0;
        while (i < triplets.size()) {
            const auto r = triplets[i].row;
            const auto c = triplets[i].col;
            Scalar sum{};
            while (i < triplets.size() && triplets[i].row == r && triplets[i].col == c) sum += triplets[i++].value;
            if (drop_zeros && sum == Scalar{}) continue;
            cols_out.push_back(c);
            vals_out.push_back(sum);
            ++offsets[r + 1];
        }
        for (std::size_t r = 0; r < rows; ++r) offsets[r + 1] += offsets[r];
        return CsrMatrix(rows, cols, std::move(offsets), std::move(cols_out), std::move(vals_out));
    }

    static CsrMatrix identity(std::size_t n) {
        std::vector<Triplet> t;
        for (std::size_t i = 0; i < n; ++i) t.push_back({i, i, 1.0});
        return from_triplets(n, n, std::move(t));
    }

    /// Banded Toeplitz matrix: bands[k] sits on diagonal offset (k - bands.size()/2).
    static CsrMatrix banded(std::size_t n, std::span<const Scalar> bands) {
        const auto half = static_cast<std::ptrdiff_t>(bands.size() / 2);
        std::vector<Triplet> t;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < bands.size(); ++k) {
                const auto j = static_cast<std::ptrdiff_t>(i) + static_cast<std::ptrdiff_t>(k) - half;
                if (j < 0 || j >= static_cast<std::ptrdiff_t>(n) || bands[k] == Scalar{}) continue;
                t.push_back({i, static_cast<std::size_t>(j), bands[k]});
            }
        }
        return from_triplets(n, n, std::move(t));
    }

    static CsrMatrix from_dense(const DenseMatrix& d, bool drop_zeros = true) {
        std::vector<Triplet> t;
        for (std::size_t i = 0; i < d.rows(); ++i)
            for (std::size_t j = 0; j < d.cols(); ++j)
                if (!drop_zeros || d(i, j) != Scalar{}) t.push_back({i, j, d(i, j)});
        return from_triplets(d.rows(), d.cols(), std::move(t));
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t nnz() const noexcept { return values_.size(); }
    bool is_square() const noexcept { return rows_ == cols_; }

    std::span<const std::size_t> row_offsets() const noexcept { return row_offsets_; }
    std::span<const std::size_t> col_indices() const noexcept { return col_indices_; }
    std::span<const Scalar> values() const noexcept { return values_; }

    /// Stored value at (i, j), zero when absent. Binary search within the row.
    Scalar at(std::size_t i, std::size_t j) const {
        const auto first = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i]);
        const auto last = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i + 1]);
        const auto it = std::lower_bound(first, last, j);
        if (it == last || *it != j) return {};
        return values_[static_cast<std::size_t>(it - col_indices_.begin())];
    }

    std::vector<Triplet> triplets() const {
        std::vector<Triplet> t;
        t.reserve(nnz());
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
                t.push_back({i, col_indices_[k], values_[k]});
        return t;
    }

    DenseMatrix to_dense() const {
        DenseMatrix d(rows_, cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) d(i, col_indices_[k]) = values_[k];
        return d;
    }

    friend bool operator==(const CsrMatrix&, const CsrMatrix&) = default;

private:
    void validate() const {
        if (row_offsets_.size() != rows_ + 1) throw DimensionError("CSR: row_offsets must have rows+1 entries");
        if (row_offsets_.front() != 0) throw DimensionError("CSR: row_offsets must start at 0");
        if (row_offsets_.back() != col_indices_.size() || col_indices_.size() != values_.size()) {
            throw DimensionError("CSR: offsets, indices and values disagree on nnz");
        }
        for (std::size_t i = 0; i < rows_; ++i) {
            if (row_offsets_[i] > row_offsets_[i + 1]) throw DimensionError("CSR: row_offsets decrease");
            for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
                if (col_indices_[k] >= cols_) throw DimensionError("CSR: column index out of range");
                if (k > row_offsets_[i] && col_indices_[k] <= col_indices_[k - 1]) {
                    throw DimensionError("CSR: column indices must be strictly increasing in row " +
                                         std::to_string(i));
                }
            }
        }
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::size_t> row_offsets_;
    std::vector<std::size_t> col_indices_;
    std::vector<Scalar> values_;
};

/// y = A x
inline void csr_matvec(const CsrMatrix& a, std::span<const Scalar> x, std::span<Scalar> y) {
    require_same_size(a.cols(), x.size(), "csr_matvec");
    require_same_size(a.rows(), y.size(), "csr_matvec output");
    const auto offsets = a.row_offsets();
    const auto cols = a.col_indices();
    const auto vals = a.values();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        Scalar sum{};
        for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) sum += vals[k] * x[cols[k]];
        y[i] = sum;
    }
}

inline Vector csr_matvec(const CsrMatrix& a, const Vector& x) {
    Vector y(a.rows());
    csr_matvec(a, x.span(), y.span());
    return y;
}

inline Vector operator*(const CsrMatrix& a, const Vector& x) { return csr_matvec(a, x); }

/// a - b, keeping only entries whose difference is nonzero.
inline CsrMatrix subtract(const CsrMatrix& a, const CsrMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("CSR subtract: shape mismatch");
    auto t = a.triplets();
    for (auto e : b.triplets()) {
        e.value = -e.value;
        t.push_back(e);
    }
    return CsrMatrix::from_triplets(a.rows(), a.cols(), std::move(t), /*drop_zeros=*/true);
}

inline CsrMatrix scaled(const CsrMatrix& a, Scalar s) {
    auto t = a.triplets();
    for (auto& e : t) e.value *= s;
    return CsrMatrix::from_triplets(a.rows(), a.cols(), std::move(t));
}

/// Diagonal entries; throws when any is zero (Jacobi and Gauss-Seidel need them).
inline Vector nonzero_diagonal(const CsrMatrix& a) {
    if (!a.is_square()) throw DimensionError("diagonal: matrix is not square");
    Vector d(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        d[i] = a.at(i, i);
        if (d[i] == Scalar{}) throw SingularMatrixError("zero diagonal entry at row " + std::to_string(i), i);
    }
    return d;
}

/// Assemble [[a11, a12], [a21, a22]] into one matrix.
inline CsrMatrix block_assemble(const CsrMatrix& a11, const CsrMatrix& a12, const CsrMatrix& a21,
                                const CsrMatrix& a22) {
    if (a11.rows() != a12.rows() || a21.rows() != a22.rows() || a11.cols() != a21.cols() ||
        a12.cols() != a22.cols()) {
        throw DimensionError("block_assemble: incompatible block shapes");
    }
    const std::size_t r0 = a11.rows();
    const std::size_t c0 = a11.cols();
    std::vector<Triplet> t;
    t.reserve(a11.nnz() + a12.nnz() + a21.nnz() + a22.nnz());
    for (auto e : a11.triplets()) t.push_back(e);
    for (auto e : a12.triplets()) t.push_back({e.row, e.col + c0, e.value});
    for (auto e : a21.triplets()) t.push_back({e.row + r0, e.col, e.value});
    for (auto e : a22.triplets()) t.push_back({e.row + r0, e.col + c0, e.value});
    return CsrMatrix::from_triplets(r0 + a21.rows(), c0 + a12.cols(), std::move(t));
}

} // namespace smw
