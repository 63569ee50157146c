#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "circulant.hpp"
#include "csr.hpp"
#include "dense.hpp"
#include "errors.hpp"
#include "vector.hpp"

namespace smw {

/// Dense matrix with its LU factors kept alongside for repeated solves.
class DenseLuOperator {
public:
    explicit DenseLuOperator(DenseMatrix m) : matrix_(std::move(m)), lu_(std::make_shared<LuFactorization>(matrix_)) {}

    std::size_t size() const noexcept { return matrix_.rows(); }
    const DenseMatrix& matrix() const noexcept { return matrix_; }
    Vector apply(const Vector& x) const { return matrix_ * x; }
    Vector solve(const Vector& b) const { return lu_->solve(b); }

private:
    DenseMatrix matrix_;
    std::shared_ptr<const LuFactorization> lu_;
};

/**
 * @brief The easily invertible part M of a splitting A = M - N.
 *
 * Either a circulant (FFT solves) or a small dense matrix (LU solves).
 */
class InvertibleOperator {
public:
    InvertibleOperator(Circulant c) : impl_(std::move(c)) {}  // NOLINT(google-explicit-constructor)
    InvertibleOperator(DenseLuOperator d) : impl_(std::move(d)) {}  // NOLINT(google-explicit-constructor)

    std::size_t size() const {
        return std::visit([](const auto& op) { return op.size(); }, impl_);
    }

    Vector apply(const Vector& x) const {
        return std::visit([&](const auto& op) { return op.apply(x); }, impl_);
    }

    Vector solve(const Vector& b) const {
        return std::visit([&](const auto& op) { return op.solve(b); }, impl_);
    }

    bool is_circulant() const noexcept { return std::holds_alternative<Circulant>(impl_); }
    const Circulant* circulant() const noexcept { return std::get_if<Circulant>(&impl_); }

    DenseMatrix densify(std::size_t cap = default_small_cap) const {
        if (const auto* c = circulant()) return c->densify(cap);
        const auto& d = std::get<DenseLuOperator>(impl_);
        if (d.size() > cap) throw CapacityError("densify: operator exceeds cap");
        return d.matrix();
    }

    CsrMatrix to_csr() const {
        if (const auto* c = circulant()) return c->to_csr();
        return CsrMatrix::from_dense(std::get<DenseLuOperator>(impl_).matrix());
    }

private:
    std::variant<Circulant, DenseLuOperator> impl_;
};

struct LowRankFactors {
    DenseMatrix u;  ///< n x r
    DenseMatrix v;  ///< n x r

    std::size_t rank() const noexcept { return u.cols(); }
};

struct RankOnePerturbation {
    Vector u;
    Vector v;
};

/**
 * max |N_ij - (U V^T)_ij| over all entries. U V^T vanishes outside the rows
 * where U is nonzero times the rows where V is nonzero, so only that block is
 * formed; the cost is O(nnz(N) + |I| |J| r) rather than O(n^2).
 */
inline double factor_residual(const CsrMatrix& n_mat, const LowRankFactors& f) {
    if (f.u.rows() != n_mat.rows() || f.v.rows() != n_mat.cols() || f.u.cols() != f.v.cols()) {
        throw DimensionError("low-rank factors do not match N");
    }
    auto nonzero_rows = [](const DenseMatrix& d) {
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < d.rows(); ++i) {
            for (std::size_t k = 0; k < d.cols(); ++k) {
                if (d(i, k) != Scalar{}) {
                    rows.push_back(i);
                    break;
                }
            }
        }
        return rows;
    };
    const auto rows_u = nonzero_rows(f.u);
    const auto rows_v = nonzero_rows(f.v);
    std::vector<bool> in_u(n_mat.rows(), false), in_v(n_mat.cols(), false);
    for (auto i : rows_u) in_u[i] = true;
    for (auto j : rows_v) in_v[j] = true;

    double worst = 0.0;
    for (const auto& t : n_mat.triplets()) {
        if (!(in_u[t.row] && in_v[t.col])) worst = std::max(worst, std::abs(t.value));
    }
    for (auto i : rows_u) {
        for (auto j : rows_v) {
            Scalar uv{};
            for (std::size_t k = 0; k < f.rank(); ++k) uv += f.u(i, k) * f.v(j, k);
            worst = std::max(worst, std::abs(n_mat.at(i, j) - uv));
        }
    }
    return worst;
}

/**
 * Exact factorization N = U V^T using the columns where N has stored entries:
 * V holds the matching unit vectors and U the corresponding columns of N.
 */
inline LowRankFactors column_support_factors(const CsrMatrix& n_mat) {
    std::vector<std::size_t> support(n_mat.col_indices().begin(), n_mat.col_indices().end());
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    LowRankFactors f{DenseMatrix(n_mat.rows(), support.size()), DenseMatrix(n_mat.cols(), support.size())};
    for (std::size_t k = 0; k < support.size(); ++k) {
        f.v(support[k], k) = 1.0;
        for (std::size_t i = 0; i < n_mat.rows(); ++i) f.u(i, k) = n_mat.at(i, support[k]);
    }
    return f;
}

/**
 * @brief Regular splitting A = M - N with N = U V^T.
 *
 * Immutable apart from the memoized spectral radius written by
 * validate_nearly_m (an idempotent atomic store).
 */
class SmwSplitting {
public:
    static constexpr double factor_tolerance = 1e-10;

    SmwSplitting(InvertibleOperator m, CsrMatrix n_mat, std::optional<LowRankFactors> low_rank = std::nullopt,
                 std::size_t check_cap = default_small_cap)
        : m_(std::move(m)), n_mat_(std::move(n_mat)), low_rank_(std::move(low_rank)) {
        if (!n_mat_.is_square() || n_mat_.rows() != m_.size()) {
            throw DimensionError("splitting: N is " + std::to_string(n_mat_.rows()) + "x" +
                                 std::to_string(n_mat_.cols()) + " but M has size " + std::to_string(m_.size()));
        }
        if (low_rank_ && n_mat_.rows() <= check_cap) {
            const double r = factor_residual(n_mat_, *low_rank_);
            if (!(r <= factor_tolerance)) {
                throw ConfigError("splitting: U V^T differs from N by " + std::to_string(r));
            }
        }
    }

    SmwSplitting(const SmwSplitting& other)
        : m_(other.m_), n_mat_(other.n_mat_), low_rank_(other.low_rank_), rho_(other.rho_.load()) {}

    SmwSplitting& operator=(const SmwSplitting& other) {
        if (this != &other) {
            m_ = other.m_;
            n_mat_ = other.n_mat_;
            low_rank_ = other.low_rank_;
            rho_.store(other.rho_.load());
        }
        return *this;
    }

    std::size_t size() const { return m_.size(); }
    const InvertibleOperator& m() const noexcept { return m_; }
    const CsrMatrix& n_mat() const noexcept { return n_mat_; }
    const std::optional<LowRankFactors>& low_rank() const noexcept { return low_rank_; }

    std::optional<double> validated_rho() const noexcept {
        const double r = rho_.load();
        if (std::isnan(r)) return std::nullopt;
        return r;
    }

    void record_rho(double rho) const noexcept { rho_.store(rho); }

    /// A x = M x - N x
    Vector apply_a(const Vector& x) const { return m_.apply(x) - n_mat_ * x; }

private:
    InvertibleOperator m_;
    CsrMatrix n_mat_;
    std::optional<LowRankFactors> low_rank_;
    mutable std::atomic<double> rho_{std::numeric_limits<double>::quiet_NaN()};
};

/// N = M - A stored sparse, keeping only positions where M and A differ.
inline SmwSplitting splitting_from_difference(const CsrMatrix& a, const InvertibleOperator& m) {
    if (!a.is_square() || a.rows() != m.size()) {
        throw DimensionError("splitting_from_difference: A is " + std::to_string(a.rows()) + "x" +
                             std::to_string(a.cols()) + " but M has size " + std::to_string(m.size()));
    }
    return SmwSplitting(m, subtract(m.to_csr(), a));
}

/// Dense M^{-1} N, one operator solve per column of N.
inline DenseMatrix iteration_matrix(const SmwSplitting& s, std::size_t cap = default_small_cap) {
    const std::size_t n = s.size();
    if (n > cap) throw CapacityError("iteration_matrix: n = " + std::to_string(n) + " exceeds cap " + std::to_string(cap));
    const DenseMatrix n_dense = s.n_mat().to_dense();
    DenseMatrix g(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        const Vector col = n_dense.column(j);
        if (norm(col, NormKind::inf) == 0.0) continue;
        g.set_column(j, s.m().solve(col));
    }
    return g;
}

/// The r x r capacitance-like matrix V^T M^{-1} U.
inline DenseMatrix small_core(const InvertibleOperator& m, const LowRankFactors& f) {
    if (f.u.rows() != m.size() || f.v.rows() != m.size() || f.u.cols() != f.v.cols()) {
        throw DimensionError("small_core: factor shapes do not match M");
    }
    const std::size_t r = f.rank();
    DenseMatrix minv_u(m.size(), r);
    for (std::size_t k = 0; k < r; ++k) minv_u.set_column(k, m.solve(f.u.column(k)));
    return f.v.transpose() * minv_u;
}

/// rho(V^T M^{-1} U) for explicitly given factors; the nearly-M test is rho < 1.
inline double nearly_m_rho(const InvertibleOperator& m, const LowRankFactors& f, std::size_t cap = default_small_cap) {
    if (f.rank() > cap) throw CapacityError("nearly_m_rho: rank exceeds cap");
    if (f.rank() == 0) return 0.0;
    return spectral_radius(small_core(m, f), cap);
}

/**
 * Spectral radius certifying that A is near M. Uses the r x r matrix
 * V^T M^{-1} U when factors are attached, otherwise the dense n x n
 * iteration matrix (only up to `cap`). The result is memoized on `s`.
 */
inline double validate_nearly_m(const SmwSplitting& s, std::size_t cap = default_small_cap) {
    double rho = 0.0;
    if (s.low_rank()) {
        rho = nearly_m_rho(s.m(), *s.low_rank(), cap);
    } else if (s.n_mat().nnz() == 0) {
        rho = 0.0;
    } else {
        if (s.size() > cap) {
            throw CapacityError("validate_nearly_m: no low-rank factors and n = " + std::to_string(s.size()) +
                                " exceeds cap " + std::to_string(cap));
        }
        rho = spectral_radius(iteration_matrix(s, cap), cap);
    }
    s.record_rho(rho);
    return rho;
}

/// Single nonzero eigenvalue v^T M^{-1} u of M^{-1} u v^T.
inline Scalar rank_one_eigenvalue(const InvertibleOperator& m, const RankOnePerturbation& p) {
    require_same_size(p.u.size(), m.size(), "rank_one_eigenvalue u");
    require_same_size(p.v.size(), m.size(), "rank_one_eigenvalue v");
    return dot(p.v, m.solve(p.u));
}

/**
 * |det(M - U V^T) - det(I - V^T M^{-1} U) det(M)| / max(1, |det M|).
 * Both determinants come from pivoted LU.
 */
inline double determinant_lemma_residual(const DenseMatrix& m, const DenseMatrix& u, const DenseMatrix& v,
                                         std::size_t cap = default_small_cap) {
    if (!m.is_square()) throw DimensionError("determinant_lemma_residual: M is not square");
    if (m.rows() > cap) throw CapacityError("determinant_lemma_residual: n exceeds cap");
    if (u.rows() != m.rows() || v.rows() != m.rows() || u.cols() != v.cols()) {
        throw DimensionError("determinant_lemma_residual: factor shapes do not match M");
    }
    const LuFactorization m_lu(m);  // throws on singular M
    const std::size_t r = u.cols();
    DenseMatrix minv_u(m.rows(), r);
    for (std::size_t k = 0; k < r; ++k) minv_u.set_column(k, m_lu.solve(u.column(k)));
    const DenseMatrix core = DenseMatrix::identity(r) - v.transpose() * minv_u;

    const Scalar det_m = m_lu.determinant();
    const Scalar lhs = determinant(m - u * v.transpose());
    const Scalar rhs = determinant(core) * det_m;
    return std::abs(lhs - rhs) / std::max(1.0, std::abs(det_m));
}

/**
 * Distance between the spectrum of M^{-1} N and that of V^T M^{-1} U.
 *
 * The r largest-magnitude eigenvalues of M^{-1} N are matched against the r
 * eigenvalues of the small matrix (Hausdorff distance); the remaining n - r
 * must be zeros, and their largest magnitude also counts toward the result.
 */
inline double spectrum_coincidence_check(const SmwSplitting& s, std::size_t cap = default_small_cap) {
    if (!s.low_rank()) throw ConfigError("spectrum_coincidence_check needs low-rank factors");
    if (s.size() > cap) throw CapacityError("spectrum_coincidence_check: n exceeds cap");
    const auto& f = *s.low_rank();
    auto big = dense_eigenvalues(iteration_matrix(s, cap), cap);
    const auto small = f.rank() == 0 ? std::vector<Scalar>{} : dense_eigenvalues(small_core(s.m(), f), cap);

    std::sort(big.begin(), big.end(), [](const Scalar& a, const Scalar& b) { return std::abs(a) > std::abs(b); });
    const std::size_t r = std::min(small.size(), big.size());
    double tail = 0.0;
    for (std::size_t k = r; k < big.size(); ++k) tail = std::max(tail, std::abs(big[k]));
    const std::span<const Scalar> head(big.data(), r);
    const double head_distance = r == 0 ? 0.0 : hausdorff_distance(head, small);
    return std::max(head_distance, tail);
}

} // namespace smw
