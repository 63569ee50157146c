#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "circulant.hpp"
#include "matrix_market.hpp"
#include "problems.hpp"
#include "solvers.hpp"
#include "splitting.hpp"

/**
 * @file bench.hpp
 *
 * @brief Experiment driver behind the command-line tool: problem and method
 * registries, benchmark runs, table/JSON emitters, spectrum and dump reports.
 */

namespace smw::bench {

using json = nlohmann::json;

inline const std::vector<std::string>& problem_names() {
    static const std::vector<std::string> names{"linear", "cubic", "demo4", "mixed"};
    return names;
}

inline const std::vector<std::string>& method_names() {
    static const std::vector<std::string> names{"smw",         "esmw",  "jacobi",          "gauss_seidel",
                                                "gmres",       "block_jacobi_smw", "block_gs_smw"};
    return names;
}

inline std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
    return out;
}

inline void require_known(std::string_view kind, const std::string& name, const std::vector<std::string>& valid) {
    if (std::find(valid.begin(), valid.end(), name) == valid.end()) {
        throw ConfigError("unknown " + std::string(kind) + " '" + name + "' (valid: " + join(valid) + ")");
    }
}

inline bool is_block_method(std::string_view method) {
    return method == "block_jacobi_smw" || method == "block_gs_smw";
}

enum class Format { csv, json, md };

inline Format parse_format(std::string_view name) {
    if (name.empty() || name == "csv") return Format::csv;
    if (name == "json") return Format::json;
    if (name == "md") return Format::md;
    throw ConfigError("unknown format '" + std::string(name) + "' (valid: csv, json, md)");
}

struct BenchConfig {
    std::string problem = "linear";
    std::vector<std::size_t> sizes{1000};
    std::vector<std::string> methods{"smw"};
    double tol = 1e-8;
    /// GMRES tolerance when it should differ from the stationary methods' tol.
    std::optional<double> gmres_tol;
    Criterion criterion = Criterion::relative_residual;
    NormKind norm_kind = NormKind::two;
    std::optional<double> omega;
    Format format = Format::csv;
    std::uint64_t seed = 0;
    std::size_t repeats = 3;
    std::size_t max_iter = 10000;
    bool validate = false;

    void check() const {
        require_known("problem", problem, problem_names());
        if (sizes.empty()) throw ConfigError("sizes must not be empty");
        if (methods.empty()) throw ConfigError("methods must not be empty");
        for (const auto& m : methods) require_known("method", m, method_names());
        if (!(tol > 0.0)) throw ConfigError("tol must be positive");
        if (gmres_tol && !(*gmres_tol > 0.0)) throw ConfigError("gmres_tol must be positive");
        if (repeats == 0) throw ConfigError("repeats must be at least 1");
        if (omega && *omega == 0.0) throw ConfigError("omega must be nonzero");
    }
};

/// Increment-based stopping for stationary methods, tight residual for GMRES.
inline void apply_reference_protocol(BenchConfig& cfg) {
    cfg.criterion = Criterion::increment;
    cfg.norm_kind = NormKind::inf;
    cfg.tol = 1e-8;
    cfg.gmres_tol = 1e-10;
}

struct BenchRow {
    std::string problem;
    std::string method;
    std::size_t n = 0;
    std::size_t iterations = 0;
    bool converged = false;
    bool diverged = false;
    double final_metric = 0.0;
    double wall_seconds = 0.0;
    double tol = 0.0;
    std::string criterion;
    std::optional<double> omega;

    friend bool operator==(const BenchRow&, const BenchRow&) = default;
};

using AnyProblem = std::variant<ProblemInstance, BlockProblemInstance>;

inline AnyProblem make_problem(const std::string& name, std::size_t n) {
    require_known("problem", name, problem_names());
    if (name == "linear") return linear_element_problem(n);
    if (name == "cubic") return cubic_spline_problem(n);
    if (name == "demo4") return demo4_problem();
    return mixed_formulation_problem(n);
}

/// Block methods need the mixed problem; plain SMW/eSMW need a single splitting.
inline bool method_applies(std::string_view method, const AnyProblem& p) {
    const bool block = std::holds_alternative<BlockProblemInstance>(p);
    if (is_block_method(method)) return block;
    if (method == "smw" || method == "esmw") return !block;
    return true;
}

inline std::size_t problem_size(const AnyProblem& p) {
    if (const auto* single = std::get_if<ProblemInstance>(&p)) return single->a.rows();
    return std::get<BlockProblemInstance>(p).system.size();
}

/// Runs one method on a single-splitting system.
inline SolveReport run_method(const std::string& method, const CsrMatrix& a, const SmwSplitting& s, const Vector& b,
                              SolveOptions opts, std::optional<double> fallback_omega = std::nullopt) {
    require_known("method", method, method_names());
    if (method == "smw") return smw_iterate(s, b, opts);
    if (method == "esmw") {
        if (!opts.omega) {
            if (!fallback_omega) throw ConfigError("esmw needs --omega for this problem");
            opts.omega = *fallback_omega;
        }
        return esmw_iterate(s, b, opts);
    }
    if (method == "jacobi") return jacobi_iterate(a, b, opts);
    if (method == "gauss_seidel") return gauss_seidel_iterate(a, b, opts);
    if (method == "gmres") return gmres_solve(a, b, opts);
    throw ConfigError("method '" + method + "' is only valid with the mixed problem");
}

inline SolveReport run_method(const std::string& method, const ProblemInstance& p, SolveOptions opts) {
    return run_method(method, p.a, p.splitting, p.rhs, std::move(opts), p.suggested_omega);
}

inline SolveReport run_method(const std::string& method, const BlockProblemInstance& p, SolveOptions opts) {
    require_known("method", method, method_names());
    if (method == "block_jacobi_smw") return block_jacobi_smw(p.system, opts);
    if (method == "block_gs_smw") return block_gs_smw(p.system, opts);
    if (method == "gmres") return gmres_solve(p.system, opts);
    if (method == "jacobi" || method == "gauss_seidel") {
        const CsrMatrix full = p.system.assemble();
        const Vector b = p.system.rhs();
        return method == "jacobi" ? jacobi_iterate(full, b, opts) : gauss_seidel_iterate(full, b, opts);
    }
    throw ConfigError("method '" + method + "' needs a single-splitting problem (linear, cubic or demo4)");
}

inline SolveReport run_method(const std::string& method, const AnyProblem& p, const SolveOptions& opts) {
    return std::visit([&](const auto& inst) { return run_method(method, inst, opts); }, p);
}

inline SolveOptions options_for(const BenchConfig& cfg, const std::string& method) {
    SolveOptions opts;
    opts.tol = (method == "gmres" && cfg.gmres_tol) ? *cfg.gmres_tol : cfg.tol;
    opts.max_iter = cfg.max_iter;
    opts.criterion = cfg.criterion;
    opts.norm_kind = cfg.norm_kind;
    if (cfg.omega) opts.omega = *cfg.omega;
    opts.validate = cfg.validate;
    return opts;
}

inline BenchRow make_row(const std::string& problem, const SolveReport& r) {
    BenchRow row;
    row.problem = problem;
    row.method = r.method;
    row.n = r.n;
    row.iterations = r.iterations;
    row.converged = r.converged;
    row.diverged = r.diverged;
    row.final_metric = r.final_metric;
    row.wall_seconds = r.wall_seconds;
    row.tol = r.tol;
    row.criterion = std::string(to_string(r.criterion));
    if (r.omega) row.omega = r.omega->real();
    return row;
}

/**
 * One row per (size, method), in config order. Iteration counts come from
 * the first run; wall time is the minimum over `repeats` runs.
 */
inline std::vector<BenchRow> run_bench(const BenchConfig& cfg) {
    cfg.check();
    std::vector<BenchRow> rows;
    for (const std::size_t n : cfg.sizes) {
        const AnyProblem problem = make_problem(cfg.problem, n);
        for (const auto& method : cfg.methods) {
            const SolveOptions opts = options_for(cfg, method);
            SolveReport first = run_method(method, problem, opts);
            double best = first.wall_seconds;
            for (std::size_t rep = 1; rep < cfg.repeats; ++rep) best = std::min(best, run_method(method, problem, opts).wall_seconds);
            first.wall_seconds = best;
            rows.push_back(make_row(cfg.problem, first));
        }
    }
    return rows;
}

inline json omega_to_json(const Scalar& omega) {
    if (omega.imag() == 0.0) return omega.real();
    return json::array({omega.real(), omega.imag()});
}

inline json to_json(const BenchRow& r) {
    json j{{"problem", r.problem},   {"method", r.method},     {"n", r.n},
           {"iterations", r.iterations}, {"converged", r.converged}, {"diverged", r.diverged},
           {"final_metric", r.final_metric}, {"wall_seconds", r.wall_seconds}, {"tol", r.tol},
           {"criterion", r.criterion}};
    if (r.omega) j["omega"] = *r.omega;
    return j;
}

inline BenchRow row_from_json(const json& j) {
    BenchRow r;
    r.problem = j.at("problem").get<std::string>();
    r.method = j.at("method").get<std::string>();
    r.n = j.at("n").get<std::size_t>();
    r.iterations = j.at("iterations").get<std::size_t>();
    r.converged = j.at("converged").get<bool>();
    r.diverged = j.value("diverged", false);
    r.final_metric = j.at("final_metric").get<double>();
    r.wall_seconds = j.at("wall_seconds").get<double>();
    r.tol = j.at("tol").get<double>();
    r.criterion = j.at("criterion").get<std::string>();
    if (j.contains("omega")) r.omega = j.at("omega").get<double>();
    return r;
}

inline std::vector<BenchRow> rows_from_json(std::string_view text) {
    std::vector<BenchRow> rows;
    for (const auto& item : json::parse(text)) rows.push_back(row_from_json(item));
    return rows;
}

inline json report_to_json(const SolveReport& r) {
    json j{{"method", r.method},       {"n", r.n},
           {"iterations", r.iterations}, {"converged", r.converged},
           {"diverged", r.diverged},   {"final_metric", r.final_metric},
           {"wall_seconds", r.wall_seconds}, {"tol", r.tol},
           {"criterion", std::string(to_string(r.criterion))}};
    if (r.omega) j["omega"] = omega_to_json(*r.omega);
    if (!r.warnings.empty()) j["warnings"] = r.warnings;
    return j;
}

namespace detail {

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::string format_double(double v) {
    std::ostringstream os;
    os.precision(std::numeric_limits<double>::max_digits10);
    os << v;
    return os.str();
}

inline std::string display_name(const std::string& method) {
    if (method == "smw") return "SMW";
    if (method == "esmw") return "eSMW";
    if (method == "jacobi") return "Jacobi";
    if (method == "gauss_seidel") return "Gauss-Seidel";
    if (method == "gmres") return "GMRES";
    if (method == "block_jacobi_smw") return "Block Jacobi-SMW";
    if (method == "block_gs_smw") return "Block Gauss-Seidel-SMW";
    return method;
}

inline std::string md_cell(const BenchRow& r) {
    char buf[64];
    if (r.converged) {
        std::snprintf(buf, sizeof buf, "%.4f(%zu)", r.wall_seconds, r.iterations);
    } else {
        std::snprintf(buf, sizeof buf, "%s(%zu)", r.diverged ? "diverged" : "not converged", r.iterations);
    }
    return buf;
}

} // namespace detail

/**
 * csv: header plus one RFC-4180 line per row. json: array of row objects.
 * md: pipe table with methods as columns and (problem, n) as rows; cells
 * read "seconds(iterations)".
 */
inline std::string emit_table(const std::vector<BenchRow>& rows, Format format = Format::csv) {
    std::ostringstream out;
    switch (format) {
        case Format::csv: {
            out << "problem,method,n,iterations,converged,diverged,final_metric,wall_seconds,tol,criterion,omega\r\n";
            for (const auto& r : rows) {
                out << detail::csv_field(r.problem) << ',' << detail::csv_field(r.method) << ',' << r.n << ','
                    << r.iterations << ',' << (r.converged ? "true" : "false") << ','
                    << (r.diverged ? "true" : "false") << ',' << detail::format_double(r.final_metric) << ','
                    << detail::format_double(r.wall_seconds) << ',' << detail::format_double(r.tol) << ','
                    << detail::csv_field(r.criterion) << ',' << (r.omega ? detail::format_double(*r.omega) : "")
                    << "\r\n";
            }
            break;
        }
        case Format::json: {
            json arr = json::array();
            for (const auto& r : rows) arr.push_back(to_json(r));
            out << arr.dump(2) << '\n';
            break;
        }
        case Format::md: {
            std::vector<std::string> methods;
            std::vector<std::pair<std::string, std::size_t>> keys;
            for (const auto& r : rows) {
                if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
                const auto key = std::make_pair(r.problem, r.n);
                if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
            }
            const bool several_problems =
                std::any_of(keys.begin(), keys.end(), [&](const auto& k) { return k.first != keys.front().first; });
            out << (several_problems ? "| problem | n |" : "| n |");
            for (const auto& m : methods) out << ' ' << detail::display_name(m) << " |";
            out << '\n' << (several_problems ? "|---|---|" : "|---|");
            for (std::size_t i = 0; i < methods.size(); ++i) out << "---|";
            out << '\n';
            for (const auto& [problem, n] : keys) {
                out << '|';
                if (several_problems) out << ' ' << problem << " |";
                out << ' ' << n << " |";
                for (const auto& m : methods) {
                    const auto it = std::find_if(rows.begin(), rows.end(), [&](const BenchRow& r) {
                        return r.problem == problem && r.n == n && r.method == m;
                    });
                    out << ' ' << (it == rows.end() ? std::string("-") : detail::md_cell(*it)) << " |";
                }
                out << '\n';
            }
            break;
        }
    }
    return out.str();
}

/// Builds a config from a JSON object using the same keys as the CLI flags.
inline BenchConfig config_from_json(const json& j) {
    BenchConfig cfg;
    if (j.contains("protocol")) {
        if (j.at("protocol").get<std::string>() != "reference") throw ConfigError("unknown protocol (valid: reference)");
        apply_reference_protocol(cfg);
    }
    if (j.contains("problem")) cfg.problem = j.at("problem").get<std::string>();
    if (j.contains("sizes")) cfg.sizes = j.at("sizes").get<std::vector<std::size_t>>();
    if (j.contains("methods")) cfg.methods = j.at("methods").get<std::vector<std::string>>();
    if (j.contains("tol")) cfg.tol = j.at("tol").get<double>();
    if (j.contains("gmres_tol")) cfg.gmres_tol = j.at("gmres_tol").get<double>();
    if (j.contains("criterion")) cfg.criterion = parse_criterion(j.at("criterion").get<std::string>());
    if (j.contains("norm")) cfg.norm_kind = parse_norm_kind(j.at("norm").get<std::string>());
    if (j.contains("omega")) cfg.omega = j.at("omega").get<double>();
    if (j.contains("format")) cfg.format = parse_format(j.at("format").get<std::string>());
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("repeats")) cfg.repeats = j.at("repeats").get<std::size_t>();
    if (j.contains("max_iter")) cfg.max_iter = j.at("max_iter").get<std::size_t>();
    if (j.contains("validate")) cfg.validate = j.at("validate").get<bool>();
    return cfg;
}

struct SpectrumReport {
    std::string problem;
    std::size_t n = 0;
    std::optional<double> rho_low_rank;  ///< rho(V^T M^-1 U)
    double rho_dense = 0.0;              ///< rho(M^-1 N), or of the block Jacobi iteration for mixed
    std::optional<double> coincidence_distance;
    std::optional<double> determinant_residual;
    std::optional<double> rho_corner_factors;
    std::optional<bool> corner_factors_match;
    std::optional<double> rho_block_splitting;  ///< per-block rho(M_i^-1 N_i) for mixed

    bool converges() const noexcept { return rho_dense < 1.0; }
};

namespace detail {

inline SpectrumReport single_spectrum(const std::string& name, const SmwSplitting& s,
                                      const std::optional<LowRankFactors>& corner, std::optional<bool> corner_match,
                                      std::size_t cap) {
    SpectrumReport rep;
    rep.problem = name;
    rep.n = s.size();
    rep.rho_dense = spectral_radius(iteration_matrix(s, cap), cap);
    if (s.low_rank()) {
        const auto& f = *s.low_rank();
        rep.rho_low_rank = validate_nearly_m(s, cap);
        rep.coincidence_distance = spectrum_coincidence_check(s, cap);
        rep.determinant_residual = determinant_lemma_residual(s.m().densify(cap), f.u, f.v, cap);
    }
    if (corner) {
        rep.rho_corner_factors = nearly_m_rho(s.m(), *corner, cap);
        rep.corner_factors_match = corner_match;
    }
    return rep;
}

/// Dense block Jacobi-SMW iteration matrix blockdiag(M1, M2)^{-1} [[N1, -B1], [-B2, N2]].
inline DenseMatrix block_iteration_matrix(const BlockSystem& sys, std::size_t cap) {
    const std::size_t n = sys.n();
    const std::size_t total = sys.size();
    if (total > cap) throw CapacityError("block iteration matrix exceeds cap");
    const DenseMatrix rhs_blocks =
        block_assemble(sys.s1().n_mat(), scaled(sys.b1_mat(), -1.0), scaled(sys.b2_mat(), -1.0), sys.s2().n_mat())
            .to_dense();
    DenseMatrix g(total, total);
    for (std::size_t j = 0; j < total; ++j) {
        const Vector col = rhs_blocks.column(j);
        g.set_column(j, stack(sys.s1().m().solve(slice(col, 0, n)), sys.s2().m().solve(slice(col, n, sys.m()))));
    }
    return g;
}

} // namespace detail

/**
 * Spectral diagnostics for a shipped problem. `m_override`, when given,
 * replaces the problem's circulant M (N is recomputed as M - A and no
 * factors are attached).
 */
inline SpectrumReport spectrum_report(const std::string& problem, std::size_t n,
                                      const std::optional<Stencil>& m_override = std::nullopt,
                                      std::size_t cap = default_small_cap) {
    const AnyProblem p = make_problem(problem, n);
    if (problem_size(p) > cap) {
        throw CapacityError("spectrum: n = " + std::to_string(problem_size(p)) + " exceeds cap " + std::to_string(cap));
    }
    if (const auto* single = std::get_if<ProblemInstance>(&p)) {
        if (m_override) {
            const SmwSplitting s =
                splitting_from_difference(single->a, circulant_from_stencil(single->a.rows(), *m_override));
            return detail::single_spectrum(problem, s, std::nullopt, std::nullopt, cap);
        }
        return detail::single_spectrum(problem, single->splitting, single->corner_factors, single->corner_factors_match,
                                       cap);
    }
    const auto& block = std::get<BlockProblemInstance>(p);
    const BlockSystem* sys = &block.system;
    std::optional<BlockSystem> overridden;
    if (m_override) {
        const SmwSplitting s1 = splitting_from_difference(sys->a1(), circulant_from_stencil(sys->n(), *m_override));
        const SmwSplitting s2 = splitting_from_difference(sys->a2(), circulant_from_stencil(sys->m(), *m_override));
        overridden.emplace(sys->a1(), sys->a2(), sys->b1_mat(), sys->b2_mat(), sys->rhs1(), sys->rhs2(), s1, s2);
        sys = &*overridden;
    }
    SpectrumReport rep = detail::single_spectrum(problem, sys->s1(), std::nullopt, std::nullopt, cap);
    rep.rho_block_splitting = rep.rho_dense;
    rep.n = sys->size();
    rep.rho_dense = spectral_radius(detail::block_iteration_matrix(*sys, cap), cap);
    return rep;
}

inline std::string format_spectrum(const SpectrumReport& r) {
    std::ostringstream out;
    out.precision(10);
    out << "problem: " << r.problem << "\n";
    out << "n: " << r.n << "\n";
    if (r.rho_block_splitting) out << "rho(M1^-1 N1): " << *r.rho_block_splitting << "\n";
    if (r.rho_low_rank) out << "rho(V^T M^-1 U): " << *r.rho_low_rank << "\n";
    out << (r.rho_block_splitting ? "rho(block Jacobi-SMW iteration): " : "rho(M^-1 N): ") << r.rho_dense << "\n";
    if (r.coincidence_distance) out << "spectrum coincidence distance: " << *r.coincidence_distance << "\n";
    if (r.determinant_residual) out << "determinant lemma residual: " << *r.determinant_residual << "\n";
    if (r.rho_corner_factors) {
        out << "rho with corner U, V: " << *r.rho_corner_factors << "\n";
        out << "corner U V^T equals N: " << (r.corner_factors_match.value_or(false) ? "yes" : "no") << "\n";
    }
    out << (r.converges() ? "nearly-M condition holds: rho < 1\n" : "nearly-M condition FAILS: rho >= 1\n");
    return out.str();
}

/// Writes the problem's matrices and vectors as Matrix Market files; returns the paths.
inline std::vector<std::string> dump_problem(const std::string& problem, std::size_t n,
                                             const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::string> written;
    auto put_matrix = [&](const std::string& name, const CsrMatrix& m) {
        const auto path = (dir / (name + ".mtx")).string();
        mm::write_matrix_file(path, m);
        written.push_back(path);
    };
    auto put_vector = [&](const std::string& name, const Vector& v) {
        const auto path = (dir / (name + ".mtx")).string();
        mm::write_vector_file(path, v);
        written.push_back(path);
    };
    auto put_dense = [&](const std::string& name, const DenseMatrix& d) { put_matrix(name, CsrMatrix::from_dense(d)); };

    const AnyProblem p = make_problem(problem, n);
    if (const auto* single = std::get_if<ProblemInstance>(&p)) {
        put_matrix("A", single->a);
        put_matrix("M", single->splitting.m().to_csr());
        put_matrix("N", single->splitting.n_mat());
        put_vector("rhs", single->rhs);
        put_vector("exact", single->exact_solution);
        if (const auto& f = single->splitting.low_rank()) {
            put_dense("U", f->u);
            put_dense("V", f->v);
        }
        return written;
    }
    const auto& sys = std::get<BlockProblemInstance>(p).system;
    put_matrix("A1", sys.a1());
    put_matrix("A2", sys.a2());
    put_matrix("B1", sys.b1_mat());
    put_matrix("B2", sys.b2_mat());
    put_matrix("M1", sys.s1().m().to_csr());
    put_matrix("M2", sys.s2().m().to_csr());
    put_matrix("N1", sys.s1().n_mat());
    put_matrix("N2", sys.s2().n_mat());
    put_matrix("K", sys.assemble());
    put_vector("rhs", sys.rhs());
    put_vector("exact", std::get<BlockProblemInstance>(p).exact_solution);
    return written;
}

} // namespace smw::bench
