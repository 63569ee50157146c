#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "errors.hpp"
#include "vector.hpp"

namespace smw {

/// Row-major dense complex matrix. Used for small oracles and low-rank factors.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), entries_(rows * cols) {}

    DenseMatrix(std::initializer_list<std::initializer_list<Scalar>> rows) {
        rows_ = rows.size();
        cols_ = rows_ == 0 ? 0 : rows.begin()->size();
        entries_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_) throw DimensionError("ragged dense matrix literal");
            entries_.insert(entries_.end(), r.begin(), r.end());
        }
    }

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static DenseMatrix diagonal(const Vector& d) {
        DenseMatrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }

    Scalar& operator()(std::size_t i, std::size_t j) noexcept { return entries_[i * cols_ + j]; }
    const Scalar& operator()(std::size_t i, std::size_t j) const noexcept { return entries_[i * cols_ + j]; }

    std::span<const Scalar> entries() const noexcept { return entries_; }

    Vector column(std::size_t j) const {
        Vector c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }

    void set_column(std::size_t j, const Vector& c) {
        require_same_size(c.size(), rows_, "set_column");
        for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = c[i];
    }

    DenseMatrix transpose() const {
        DenseMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    /// Max absolute row sum.
    double norm_inf() const {
        double best = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < cols_; ++j) s += std::abs((*this)(i, j));
            best = std::max(best, s);
        }
        return best;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& z : entries_) m = std::max(m, std::abs(z));
        return m;
    }

    friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Scalar> entries_;
};

inline Vector operator*(const DenseMatrix& a, const Vector& x) {
    require_same_size(a.cols(), x.size(), "dense matvec");
    Vector y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        Scalar s{};
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

inline DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
    require_same_size(a.cols(), b.rows(), "dense matmul");
    DenseMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Scalar aik = a(i, k);
            if (aik == Scalar{}) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

inline DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("dense subtract: shape mismatch");
    DenseMatrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
    return c;
}

inline DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("dense add: shape mismatch");
    DenseMatrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + b(i, j);
    return c;
}

inline DenseMatrix operator*(Scalar s, const DenseMatrix& a) {
    DenseMatrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = s * a(i, j);
    return c;
}

/**
 * @brief LU factorization PA = LU with partial pivoting.
 *
 * Throws SingularMatrixError when a pivot falls to 1e-14 * ||A||_inf or below.
 */
class LuFactorization {
public:
    static constexpr double pivot_floor = 1e-14;

    explicit LuFactorization(DenseMatrix a) : lu_(std::move(a)) {
        if (!lu_.is_square()) throw DimensionError("LU: matrix is not square");
        const std::size_t n = lu_.rows();
        const double threshold = pivot_floor * lu_.norm_inf();
        perm_.resize(n);
        for (std::size_t i = 0; i < n; ++i) perm_[i] = i;

        for (std::size_t k = 0; k < n; ++k) {
            std::size_t p = k;
            double best = std::abs(lu_(k, k));
            for (std::size_t i = k + 1; i < n; ++i) {
                const double v = std::abs(lu_(i, k));
                if (v > best) {
                    best = v;
                    p = i;
                }
            }
            if (!(best > threshold)) {
                throw SingularMatrixError("LU: pivot " + std::to_string(k) + " is singular to working precision", k);
            }
            if (p != k) {
                for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
                std::swap(perm_[k], perm_[p]);
                swaps_ ^= 1;
            }
            const Scalar pivot = lu_(k, k);
            for (std::size_t i = k + 1; i < n; ++i) {
                const Scalar l = lu_(i, k) / pivot;
                lu_(i, k) = l;
                if (l == Scalar{}) continue;
                for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= l * lu_(k, j);
            }
        }
    }

    std::size_t size() const noexcept { return lu_.rows(); }

    Vector solve(const Vector& b) const {
        require_same_size(b.size(), size(), "LU solve");
        const std::size_t n = size();
        Vector x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < i; ++j) x[i] -= lu_(i, j) * x[j];
        for (std::size_t i = n; i-- > 0;) {
            for (std::size_t j = i + 1; j < n; ++j) x[i] -= lu_(i, j) * x[j];
            x[i] /= lu_(i, i);
        }
        return x;
    }

    Scalar determinant() const {
        Scalar d = swaps_ ? -1.0 : 1.0;
        for (std::size_t i = 0; i < size(); ++i) d *= lu_(i, i);
        return d;
    }

private:
    DenseMatrix lu_;
    std::vector<std::size_t> perm_;
    int swaps_ = 0;
};

inline Vector dense_lu_solve(const DenseMatrix& a, const Vector& b) {
    require_same_size(a.cols(), b.size(), "dense_lu_solve");
    return LuFactorization(a).solve(b);
}

/// Determinant via LU; a singular pivot yields exactly zero rather than an error.
inline Scalar determinant(const DenseMatrix& a) {
    if (!a.is_square()) throw DimensionError("determinant: matrix is not square");
    if (a.rows() == 0) return 1.0;
    try {
        return LuFactorization(a).determinant();
    } catch (const SingularMatrixError&) {
        return 0.0;
    }
}

/**
 * All eigenvalues of a small square matrix, with algebraic multiplicity.
 *
 * Backed by Eigen's complex Schur decomposition (Hessenberg reduction plus
 * shifted QR). Refuses matrices larger than `cap`.
 */
inline std::vector<Scalar> dense_eigenvalues(const DenseMatrix& a, std::size_t cap = default_small_cap) {
    if (!a.is_square()) throw DimensionError("dense_eigenvalues: matrix is not square");
    if (a.rows() > cap) {
        throw CapacityError("dense_eigenvalues: dimension " + std::to_string(a.rows()) + " exceeds cap " +
                            std::to_string(cap));
    }
    const auto n = static_cast<Eigen::Index>(a.rows());
    if (n == 0) return {};
    Eigen::MatrixXcd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            m(i, j) = a(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) throw EigenSolverError("dense_eigenvalues: QR iteration did not converge");
    const auto& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

inline double spectral_radius(std::span<const Scalar> eigenvalues) {
    double r = 0.0;
    for (const auto& z : eigenvalues) r = std::max(r, std::abs(z));
    return r;
}

inline double spectral_radius(const DenseMatrix& a, std::size_t cap = default_small_cap) {
    const auto ev = dense_eigenvalues(a, cap);
    return spectral_radius(ev);
}

/// Symmetric Hausdorff distance between two finite point sets in the complex plane.
inline double hausdorff_distance(std::span<const Scalar> a, std::span<const Scalar> b) {
    if (a.empty() && b.empty()) return 0.0;
    if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
    auto directed = [](std::span<const Scalar> from, std::span<const Scalar> to) {
        double worst = 0.0;
        for (const auto& p : from) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : to) best = std::min(best, std::abs(p - q));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

} // namespace smw
