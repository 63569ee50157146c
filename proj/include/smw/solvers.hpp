#pragma once

#include <chrono>
#include <concepts>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "csr.hpp"
#include "errors.hpp"
#include "splitting.hpp"
#include "vector.hpp"

namespace smw {

enum class Criterion { relative_residual, absolute_residual, increment, error_vs_known };

inline std::string_view to_string(Criterion c) {
    switch (c) {
        case Criterion::relative_residual: return "relative_residual";
        case Criterion::absolute_residual: return "absolute_residual";
        case Criterion::increment: return "increment";
        case Criterion::error_vs_known: return "error_vs_known";
    }
    return "unknown";
}

inline Criterion parse_criterion(std::string_view name) {
    for (auto c : {Criterion::relative_residual, Criterion::absolute_residual, Criterion::increment,
                   Criterion::error_vs_known}) {
        if (to_string(c) == name) return c;
    }
    throw ConfigError("unknown criterion '" + std::string(name) +
                      "' (valid: relative_residual, absolute_residual, increment, error_vs_known)");
}

inline std::string_view to_string(NormKind k) { return k == NormKind::two ? "two" : "inf"; }

inline NormKind parse_norm_kind(std::string_view name) {
    if (name == "two" || name == "2") return NormKind::two;
    if (name == "inf") return NormKind::inf;
    throw ConfigError("unknown norm '" + std::string(name) + "' (valid: two, inf)");
}

struct SolveOptions {
    double tol = 1e-8;
    std::size_t max_iter = 10000;
    Criterion criterion = Criterion::relative_residual;
    NormKind norm_kind = NormKind::two;
    std::optional<Scalar> omega;
    bool record_history = false;
    std::optional<Vector> initial_guess;  ///< zero vector when absent
    std::optional<Vector> known_solution;  ///< required by error_vs_known
    /// Stationary methods stop as divergent once the metric exceeds this multiple of its first value.
    double divergence_factor = 1e12;
    /// Run validate_nearly_m before iterating (SMW methods only).
    bool validate = false;
    std::size_t validate_cap = default_small_cap;
    /// Called after every iteration with (k, x^(k)). Runs inside the timed loop.
    std::function<void(std::size_t, const Vector&)> observer;
};

struct SolveReport {
    std::string method;
    std::size_t n = 0;
    std::size_t iterations = 0;
    bool converged = false;
    bool diverged = false;
    double final_metric = 0.0;
    std::vector<double> metric_history;
    double wall_seconds = 0.0;
    Vector solution;
    double tol = 0.0;
    Criterion criterion = Criterion::relative_residual;
    std::optional<Scalar> omega;
    std::vector<std::string> warnings;
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline void check_options(const SolveOptions& opts, std::size_t n) {
    if (!(opts.tol > 0.0)) throw ConfigError("tol must be positive");
    if (opts.max_iter == 0) throw ConfigError("max_iter must be positive");
    if (opts.criterion == Criterion::error_vs_known) {
        if (!opts.known_solution) throw ConfigError("error_vs_known needs a known solution");
        require_same_size(opts.known_solution->size(), n, "known solution");
    }
    if (opts.initial_guess) require_same_size(opts.initial_guess->size(), n, "initial guess");
}

inline Vector start_vector(const SolveOptions& opts, std::size_t n) {
    return opts.initial_guess ? *opts.initial_guess : Vector(n);
}

/**
 * Shared loop for the stationary methods: x <- step(x) until the metric
 * drops to tol, max_iter is reached or the iterates blow up.
 */
template <class Step, class Residual>
SolveReport run_stationary(std::string method, const Vector& b, const SolveOptions& opts, Step&& step,
                           Residual&& residual) {
    const std::size_t n = b.size();
    check_options(opts, n);
    SolveReport report;
    report.method = std::move(method);
    report.n = n;
    report.tol = opts.tol;
    report.criterion = opts.criterion;
    report.omega = opts.omega;

    const double b_norm = norm(b, opts.norm_kind);
    auto metric_of = [&](const Vector& x_new, const Vector& x_old) {
        switch (opts.criterion) {
            case Criterion::relative_residual: {
                const double r = norm(residual(x_new), opts.norm_kind);
                return b_norm > 0.0 ? r / b_norm : r;
            }
            case Criterion::absolute_residual: return norm(residual(x_new), opts.norm_kind);
            case Criterion::increment: return norm(x_new - x_old, opts.norm_kind);
            case Criterion::error_vs_known: return norm(x_new - *opts.known_solution, opts.norm_kind);
        }
        return 0.0;
    };

    Vector x = start_vector(opts, n);
    double reference = 0.0;
    const auto t0 = Clock::now();
    for (std::size_t k = 1; k <= opts.max_iter; ++k) {
        Vector x_new = step(x);
        const double metric = metric_of(x_new, x);
        x = std::move(x_new);
        report.iterations = k;
        report.final_metric = metric;
        if (opts.record_history) report.metric_history.push_back(metric);
        if (opts.observer) opts.observer(k, x);
        if (k == 1) reference = metric;
        if (metric <= opts.tol) {
            report.converged = true;
            break;
        }
        if (!std::isfinite(metric) || metric > opts.divergence_factor * reference) {
            report.diverged = true;
            break;
        }
    }
    report.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    report.solution = std::move(x);
    return report;
}

inline std::vector<std::string> splitting_warnings(const SmwSplitting& s, const SolveOptions& opts) {
    std::vector<std::string> w;
    if (opts.validate) validate_nearly_m(s, opts.validate_cap);
    const auto rho = s.validated_rho();
    if (!rho) {
        w.emplace_back("splitting not validated: nearly-M condition rho(V^T M^-1 U) < 1 was not checked");
    } else if (*rho >= 1.0) {
        w.emplace_back("validated rho = " + std::to_string(*rho) + " >= 1: convergence is not guaranteed");
    }
    return w;
}

} // namespace detail

/// x^(k+1) = M^{-1} (N x^(k) + b); M^{-1} is an FFT solve when M is circulant.
inline SolveReport smw_iterate(const SmwSplitting& s, const Vector& b, const SolveOptions& opts = {}) {
    require_same_size(b.size(), s.size(), "smw_iterate right-hand side");
    auto warnings = detail::splitting_warnings(s, opts);
    auto step = [&](const Vector& x) {
        Vector rhs = s.n_mat() * x;
        axpy(1.0, b, rhs);
        return s.m().solve(rhs);
    };
    auto residual = [&](const Vector& x) { return b - s.apply_a(x); };
    auto report = detail::run_stationary("smw", b, opts, step, residual);
    report.warnings = std::move(warnings);
    return report;
}

/**
 * Extrapolated iteration x^(k+1) = (1 - w) x^(k) + w M^{-1}(N x^(k) + b).
 * With w = 1 each step is bitwise the plain SMW step.
 */
inline SolveReport esmw_iterate(const SmwSplitting& s, const Vector& b, const SolveOptions& opts) {
    require_same_size(b.size(), s.size(), "esmw_iterate right-hand side");
    if (!opts.omega) throw ConfigError("esmw_iterate needs an extrapolation parameter omega");
    const Scalar omega = *opts.omega;
    if (omega == Scalar{}) throw ConfigError("omega must be nonzero");
    auto warnings = detail::splitting_warnings(s, opts);
    auto step = [&](const Vector& x) {
        Vector rhs = s.n_mat() * x;
        axpy(1.0, b, rhs);
        Vector y = s.m().solve(rhs);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = (1.0 - omega) * x[i] + omega * y[i];
        return y;
    };
    auto residual = [&](const Vector& x) { return b - s.apply_a(x); };
    auto report = detail::run_stationary("esmw", b, opts, step, residual);
    report.warnings = std::move(warnings);
    return report;
}

/// 2 / (lambda_min + lambda_max) for a real spectrum of the iteration matrix.
inline double optimal_omega(double lambda_min, double lambda_max) {
    const double sum = lambda_min + lambda_max;
    if (sum == 0.0 || !std::isfinite(sum)) throw ConfigError("optimal_omega: lambda_min + lambda_max must be nonzero");
    return 2.0 / sum;
}

/**
 * @brief 2x2 block system [[A1, B1], [B2, A2]] [x; y] = [b1; b2].
 *
 * A1 (n x n) and A2 (m x m) each carry a splitting A_i = M_i - N_i.
 */
class BlockSystem {
public:
    BlockSystem(CsrMatrix a1, CsrMatrix a2, CsrMatrix b1_mat, CsrMatrix b2_mat, Vector rhs1, Vector rhs2,
                SmwSplitting s1, SmwSplitting s2)
        : a1_(std::move(a1)),
          a2_(std::move(a2)),
          b1_(std::move(b1_mat)),
          b2_(std::move(b2_mat)),
          rhs1_(std::move(rhs1)),
          rhs2_(std::move(rhs2)),
          s1_(std::move(s1)),
          s2_(std::move(s2)) {
        const std::size_t n = a1_.rows();
        const std::size_t m = a2_.rows();
        if (!a1_.is_square() || !a2_.is_square()) throw DimensionError("block system: A1 and A2 must be square");
        if (b1_.rows() != n || b1_.cols() != m) throw DimensionError("block system: B1 must be n x m");
        if (b2_.rows() != m || b2_.cols() != n) throw DimensionError("block system: B2 must be m x n");
        require_same_size(rhs1_.size(), n, "block system rhs1");
        require_same_size(rhs2_.size(), m, "block system rhs2");
        require_same_size(s1_.size(), n, "block system splitting 1");
        require_same_size(s2_.size(), m, "block system splitting 2");
    }

    std::size_t n() const noexcept { return a1_.rows(); }
    std::size_t m() const noexcept { return a2_.rows(); }
    std::size_t size() const noexcept { return n() + m(); }

    const CsrMatrix& a1() const noexcept { return a1_; }
    const CsrMatrix& a2() const noexcept { return a2_; }
    const CsrMatrix& b1_mat() const noexcept { return b1_; }
    const CsrMatrix& b2_mat() const noexcept { return b2_; }
    const Vector& rhs1() const noexcept { return rhs1_; }
    const Vector& rhs2() const noexcept { return rhs2_; }
    const SmwSplitting& s1() const noexcept { return s1_; }
    const SmwSplitting& s2() const noexcept { return s2_; }

    Vector rhs() const { return stack(rhs1_, rhs2_); }

    /// Full block matrix times the stacked vector [x; y].
    Vector apply(const Vector& u) const {
        require_same_size(u.size(), size(), "block apply");
        const Vector x = slice(u, 0, n());
        const Vector y = slice(u, n(), m());
        return stack(a1_ * x + b1_ * y, b2_ * x + a2_ * y);
    }

    CsrMatrix assemble() const { return block_assemble(a1_, b1_, b2_, a2_); }

private:
    CsrMatrix a1_, a2_, b1_, b2_;
    Vector rhs1_, rhs2_;
    SmwSplitting s1_, s2_;
};

namespace detail {

inline SolveReport block_smw(const BlockSystem& sys, const SolveOptions& opts, bool gauss_seidel) {
    const Vector b = sys.rhs();
    auto warnings = splitting_warnings(sys.s1(), opts);
    for (auto& w : splitting_warnings(sys.s2(), opts)) warnings.push_back("block 2: " + w);
    const std::size_t n = sys.n();
    const std::size_t m = sys.m();
    auto step = [&](const Vector& u) {
        const Vector x = slice(u, 0, n);
        const Vector y = slice(u, n, m);
        Vector r1 = sys.s1().n_mat() * x - sys.b1_mat() * y;
        axpy(1.0, sys.rhs1(), r1);
        const Vector x_new = sys.s1().m().solve(r1);
        Vector r2 = sys.s2().n_mat() * y - sys.b2_mat() * (gauss_seidel ? x_new : x);
        axpy(1.0, sys.rhs2(), r2);
        return stack(x_new, sys.s2().m().solve(r2));
    };
    auto residual = [&](const Vector& u) { return b - sys.apply(u); };
    auto report = run_stationary(gauss_seidel ? "block_gs_smw" : "block_jacobi_smw", b, opts, step, residual);
    report.warnings = std::move(warnings);
    return report;
}

} // namespace detail

/// Both block updates use iterate k: M1 x' = N1 x - B1 y + b1, M2 y' = N2 y - B2 x + b2.
inline SolveReport block_jacobi_smw(const BlockSystem& sys, const SolveOptions& opts = {}) {
    return detail::block_smw(sys, opts, false);
}

/// As block_jacobi_smw, but the y update already sees the new x.
inline SolveReport block_gs_smw(const BlockSystem& sys, const SolveOptions& opts = {}) {
    return detail::block_smw(sys, opts, true);
}

inline SolveReport jacobi_iterate(const CsrMatrix& a, const Vector& b, const SolveOptions& opts = {}) {
    require_same_size(b.size(), a.rows(), "jacobi right-hand side");
    const Vector diag = nonzero_diagonal(a);
    const auto offsets = a.row_offsets();
    const auto cols = a.col_indices();
    const auto vals = a.values();
    auto step = [&](const Vector& x) {
        Vector x_new(x.size());
        for (std::size_t i = 0; i < a.rows(); ++i) {
            Scalar sum = b[i];
            for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k)
                if (cols[k] != i) sum -= vals[k] * x[cols[k]];
            x_new[i] = sum / diag[i];
        }
        return x_new;
    };
    auto residual = [&](const Vector& x) { return b - a * x; };
    return detail::run_stationary("jacobi", b, opts, step, residual);
}

/// Forward sweep in natural row order.
inline SolveReport gauss_seidel_iterate(const CsrMatrix& a, const Vector& b, const SolveOptions& opts = {}) {
    require_same_size(b.size(), a.rows(), "gauss_seidel right-hand side");
    const Vector diag = nonzero_diagonal(a);
    const auto offsets = a.row_offsets();
    const auto cols = a.col_indices();
    const auto vals = a.values();
    auto step = [&](const Vector& x) {
        Vector x_new = x;
        for (std::size_t i = 0; i < a.rows(); ++i) {
            Scalar sum = b[i];
            for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k)
                if (cols[k] != i) sum -= vals[k] * x_new[cols[k]];
            x_new[i] = sum / diag[i];
        }
        return x_new;
    };
    auto residual = [&](const Vector& x) { return b - a * x; };
    return detail::run_stationary("gauss_seidel", b, opts, step, residual);
}

/**
 * @brief Full (non-restarted) GMRES.
 *
 * Modified Gram-Schmidt Arnoldi with Givens rotations on the Hessenberg
 * least-squares problem. One iteration is one Arnoldi step. The stopping
 * metric is the 2-norm residual estimate |g_{k+1}|, relative to ||b|| unless
 * the absolute_residual criterion is requested; other criteria fall back to
 * the relative residual.
 */
template <class Apply>
    requires std::invocable<Apply&, const Vector&>
SolveReport gmres_solve(Apply&& apply, const Vector& b, const SolveOptions& opts = {}) {
    const std::size_t n = b.size();
    detail::check_options(opts, n);
    SolveReport report;
    report.method = "gmres";
    report.n = n;
    report.tol = opts.tol;
    report.criterion =
        opts.criterion == Criterion::absolute_residual ? Criterion::absolute_residual : Criterion::relative_residual;

    const double b_norm = norm(b);
    const double scale = (report.criterion == Criterion::relative_residual && b_norm > 0.0) ? b_norm : 1.0;

    const auto t0 = detail::Clock::now();
    Vector x = detail::start_vector(opts, n);
    Vector r = b - apply(x);
    const double beta = norm(r);
    report.final_metric = beta / scale;
    if (report.final_metric <= opts.tol) {
        report.converged = true;
        report.wall_seconds = std::chrono::duration<double>(detail::Clock::now() - t0).count();
        report.solution = std::move(x);
        return report;
    }

    const std::size_t max_steps = std::min(opts.max_iter, n);
    std::vector<Vector> basis;
    basis.push_back((1.0 / beta) * r);
    std::vector<std::vector<Scalar>> h;  // column k holds H(0..k+1, k) after rotation
    std::vector<double> cs;
    std::vector<Scalar> sn;
    std::vector<Scalar> g{Scalar(beta)};

    std::size_t k = 0;
    while (k < max_steps) {
        Vector w = apply(basis[k]);
        const double w_norm0 = norm(w);
        std::vector<Scalar> col(k + 2);
        for (std::size_t j = 0; j <= k; ++j) {
            col[j] = dotc(basis[j], w);
            axpy(-col[j], basis[j], w);
        }
        const double h_next = norm(w);
        col[k + 1] = h_next;

        for (std::size_t j = 0; j < k; ++j) {
            const Scalar a = col[j];
            const Scalar c = col[j + 1];
            col[j] = cs[j] * a + sn[j] * c;
            col[j + 1] = -std::conj(sn[j]) * a + cs[j] * c;
        }
        const Scalar a = col[k];
        const Scalar c = col[k + 1];
        double cos_k = 1.0;
        Scalar sin_k = 0.0;
        const double abs_a = std::abs(a);
        const double abs_c = std::abs(c);
        if (abs_c != 0.0) {
            const double rr = std::hypot(abs_a, abs_c);
            if (abs_a == 0.0) {
                cos_k = 0.0;
                sin_k = std::conj(c) / abs_c;
                col[k] = abs_c;
            } else {
                cos_k = abs_a / rr;
                sin_k = (a / abs_a) * std::conj(c) / rr;
                col[k] = (a / abs_a) * rr;
            }
            col[k + 1] = 0.0;
        }
        cs.push_back(cos_k);
        sn.push_back(sin_k);
        g.push_back(-std::conj(sin_k) * g[k]);
        g[k] = cos_k * g[k];
        h.push_back(std::move(col));
        ++k;

        const double metric = std::abs(g[k]) / scale;
        report.iterations = k;
        report.final_metric = metric;
        if (opts.record_history) report.metric_history.push_back(metric);
        if (metric <= opts.tol) {
            report.converged = true;
            break;
        }
        // happy breakdown: the Krylov space is invariant, the least-squares solution is exact
        if (h_next <= 1e-14 * w_norm0) break;
        basis.push_back((1.0 / h_next) * w);
    }

    // back substitution R y = g
    std::vector<Scalar> y(k);
    for (std::size_t i = k; i-- > 0;) {
        Scalar s = g[i];
        for (std::size_t j = i + 1; j < k; ++j) s -= h[j][i] * y[j];
        y[i] = s / h[i][i];
    }
    for (std::size_t j = 0; j < k; ++j) axpy(y[j], basis[j], x);
    if (!report.converged) report.converged = report.final_metric <= opts.tol;
    report.wall_seconds = std::chrono::duration<double>(detail::Clock::now() - t0).count();
    report.solution = std::move(x);
    if (opts.observer) opts.observer(report.iterations, report.solution);
    return report;
}

inline SolveReport gmres_solve(const CsrMatrix& a, const Vector& b, const SolveOptions& opts = {}) {
    require_same_size(b.size(), a.rows(), "gmres right-hand side");
    return gmres_solve([&](const Vector& v) { return a * v; }, b, opts);
}

inline SolveReport gmres_solve(const BlockSystem& sys, const SolveOptions& opts = {}) {
    return gmres_solve([&](const Vector& v) { return sys.apply(v); }, sys.rhs(), opts);
}

} // namespace smw
