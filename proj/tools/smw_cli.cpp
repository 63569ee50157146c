// smw_cli: run the circulant-splitting experiments from the command line.
//
//   smw_cli bench    --problem linear --sizes 1000,10000,30000 --methods smw,esmw,gauss_seidel,gmres
//   smw_cli solve    --matrix A.mtx --circulant "[-5/6, 8/3, -5/6]" --ones --method smw
//   smw_cli spectrum --problem demo4
//   smw_cli dump     --problem cubic --n 20 --dump-dir out/
//
// Exit status: 0 all solves converged (or rho < 1 for spectrum), 2 otherwise,
// 1 on usage or I/O errors.

#include <CLI11.hpp>

#include <smw/smw.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_not_converged = 2;

struct CommonSolveFlags {
    double tol = 1e-8;
    std::string criterion = "relative_residual";
    std::string norm = "two";
    std::optional<double> omega;
    std::size_t max_iter = 10000;
    bool validate = false;
};

void add_solve_flags(CLI::App* cmd, CommonSolveFlags& f) {
    cmd->add_option("--tol", f.tol, "Stopping tolerance");
    cmd->add_option("--criterion", f.criterion,
                    "relative_residual | absolute_residual | increment | error_vs_known");
    cmd->add_option("--norm", f.norm, "Norm used by the stopping metric: two | inf");
    cmd->add_option("--omega", f.omega, "Extrapolation parameter for esmw");
    cmd->add_option("--max-iter", f.max_iter, "Iteration limit");
    cmd->add_flag("--validate", f.validate, "Check the nearly-M condition before iterating");
}

smw::SolveOptions to_options(const CommonSolveFlags& f) {
    smw::SolveOptions opts;
    opts.tol = f.tol;
    opts.criterion = smw::parse_criterion(f.criterion);
    opts.norm_kind = smw::parse_norm_kind(f.norm);
    if (f.omega) opts.omega = *f.omega;
    opts.max_iter = f.max_iter;
    opts.validate = f.validate;
    return opts;
}

int run_bench_command(CLI::App* cmd, smw::bench::BenchConfig cfg_flags, const std::string& config_file,
                      const std::string& format, const std::string& criterion, const std::string& norm,
                      const std::string& protocol, const std::string& dump_dir) {
    using namespace smw::bench;
    BenchConfig cfg;
    if (!config_file.empty()) {
        std::ifstream in(config_file);
        if (!in) throw std::runtime_error("cannot open config file '" + config_file + "'");
        cfg = config_from_json(json::parse(in));
    }
    // flags override file values
    if (cmd->count("--protocol")) {
        if (protocol != "reference") throw smw::ConfigError("unknown protocol '" + protocol + "' (valid: reference)");
        apply_reference_protocol(cfg);
    }
    if (cmd->count("--problem")) cfg.problem = cfg_flags.problem;
    if (cmd->count("--sizes")) cfg.sizes = cfg_flags.sizes;
    if (cmd->count("--methods")) cfg.methods = cfg_flags.methods;
    if (cmd->count("--tol")) cfg.tol = cfg_flags.tol;
    if (cmd->count("--gmres-tol")) cfg.gmres_tol = cfg_flags.gmres_tol;
    if (cmd->count("--criterion")) cfg.criterion = smw::parse_criterion(criterion);
    if (cmd->count("--norm")) cfg.norm_kind = smw::parse_norm_kind(norm);
    if (cmd->count("--omega")) cfg.omega = cfg_flags.omega;
    if (cmd->count("--format")) cfg.format = parse_format(format);
    if (cmd->count("--seed")) cfg.seed = cfg_flags.seed;
    if (cmd->count("--repeats")) cfg.repeats = cfg_flags.repeats;
    if (cmd->count("--max-iter")) cfg.max_iter = cfg_flags.max_iter;
    if (cmd->count("--validate")) cfg.validate = cfg_flags.validate;
    cfg.check();

    if (!dump_dir.empty()) {
        for (const std::size_t n : cfg.sizes) {
            dump_problem(cfg.problem, n, std::filesystem::path(dump_dir) / (cfg.problem + "_n" + std::to_string(n)));
        }
    }
    const auto rows = run_bench(cfg);
    std::cout << emit_table(rows, cfg.format);
    const bool all_converged = std::all_of(rows.begin(), rows.end(), [](const BenchRow& r) { return r.converged; });
    return all_converged ? exit_ok : exit_not_converged;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Circulant-splitting (SMW) iterative solvers: experiments and diagnostics"};
    app.require_subcommand(1);

    // bench
    smw::bench::BenchConfig bench_cfg;
    std::string bench_config_file, bench_format = "csv", bench_criterion, bench_norm, bench_protocol, bench_dump;
    auto* bench = app.add_subcommand("bench", "Run methods over problem sizes and print a table");
    bench->add_option("--problem", bench_cfg.problem, "linear | cubic | demo4 | mixed");
    bench->add_option("--sizes", bench_cfg.sizes, "Comma-separated problem sizes")->delimiter(',');
    bench->add_option("--methods", bench_cfg.methods, "Comma-separated method names")->delimiter(',');
    bench->add_option("--tol", bench_cfg.tol, "Stopping tolerance");
    bench->add_option("--gmres-tol", bench_cfg.gmres_tol, "Separate tolerance for GMRES");
    bench->add_option("--criterion", bench_criterion, "Stopping criterion");
    bench->add_option("--norm", bench_norm, "two | inf");
    bench->add_option("--omega", bench_cfg.omega, "Extrapolation parameter for esmw");
    bench->add_option("--format", bench_format, "csv | json | md");
    bench->add_option("--seed", bench_cfg.seed, "Seed for randomized checks");
    bench->add_option("--repeats", bench_cfg.repeats, "Timing repeats (minimum is reported)");
    bench->add_option("--max-iter", bench_cfg.max_iter, "Iteration limit");
    bench->add_option("--protocol", bench_protocol,
                      "'reference': increment inf-norm 1e-8 for stationary methods, relative residual 1e-10 for GMRES");
    bench->add_option("--dump-dir", bench_dump, "Also write each problem's matrices here");
    bench->add_option("--config", bench_config_file, "JSON config file; flags override its values");
    bench->add_flag("--validate", bench_cfg.validate, "Check the nearly-M condition before iterating");

    // solve
    CommonSolveFlags solve_flags;
    std::string matrix_file, rhs_file, circulant_literal, circulant_row, solve_method = "smw", solve_problem;
    std::size_t solve_n = 1000;
    bool use_ones = false;
    auto* solve = app.add_subcommand("solve", "Solve one system and print a JSON report");
    solve->add_option("--matrix", matrix_file, "Matrix Market file holding A");
    solve->add_option("--problem", solve_problem, "Use a built-in problem instead of --matrix");
    solve->add_option("--n", solve_n, "Size for --problem");
    auto* lit = solve->add_option("--circulant", circulant_literal, "Centered stencil for M, e.g. \"[-5/6, 8/3, -5/6]\"");
    solve->add_option("--circulant-row", circulant_row, "Full first row of M, e.g. \"4,3,2,1\"")->excludes(lit);
    solve->add_option("--rhs", rhs_file, "Matrix Market array file holding b");
    solve->add_flag("--ones", use_ones, "Use b = A * ones");
    solve->add_option("--method", solve_method, "Method name");
    add_solve_flags(solve, solve_flags);

    // spectrum
    std::string spec_problem = "linear", spec_circulant;
    std::size_t spec_n = 16;
    auto* spectrum = app.add_subcommand("spectrum", "Spectral radius and splitting oracles for a small instance");
    spectrum->add_option("--problem", spec_problem, "linear | cubic | demo4 | mixed");
    spectrum->add_option("--n", spec_n, "Problem size (ignored for demo4)");
    spectrum->add_option("--circulant", spec_circulant, "Replace M by this centered stencil");

    // dump
    std::string dump_problem_name = "linear", dump_dir = ".";
    std::size_t dump_n = 16;
    auto* dump = app.add_subcommand("dump", "Write a problem's matrices as Matrix Market files");
    dump->add_option("--problem", dump_problem_name, "linear | cubic | demo4 | mixed");
    dump->add_option("--n", dump_n, "Problem size (ignored for demo4)");
    dump->add_option("--dump-dir", dump_dir, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*bench) {
            return run_bench_command(bench, bench_cfg, bench_config_file, bench_format, bench_criterion, bench_norm,
                                     bench_protocol, bench_dump);
        }

        if (*solve) {
            smw::SolveOptions opts = to_options(solve_flags);
            smw::SolveReport report;
            if (!solve_problem.empty()) {
                if (!matrix_file.empty()) throw smw::ConfigError("use either --matrix or --problem, not both");
                report = smw::bench::run_method(solve_method, smw::bench::make_problem(solve_problem, solve_n), opts);
            } else {
                if (matrix_file.empty()) throw smw::ConfigError("solve needs --matrix or --problem");
                const smw::CsrMatrix a = smw::mm::read_matrix_file(matrix_file);
                if (!a.is_square()) throw smw::DimensionError("matrix must be square");
                std::optional<smw::Circulant> m;
                if (!circulant_literal.empty()) {
                    m = smw::circulant_from_stencil(a.rows(), smw::parse_stencil_literal(circulant_literal));
                } else if (!circulant_row.empty()) {
                    const auto row = smw::parse_number_list(circulant_row);
                    if (row.size() != a.rows()) {
                        throw smw::DimensionError("--circulant-row has " + std::to_string(row.size()) +
                                                  " entries but the matrix has " + std::to_string(a.rows()) + " rows");
                    }
                    m = smw::Circulant::from_first_row(smw::Vector::from_real(row));
                } else {
                    throw smw::ConfigError("solve needs --circulant or --circulant-row");
                }
                smw::Vector b;
                if (use_ones == !rhs_file.empty()) throw smw::ConfigError("give exactly one of --rhs and --ones");
                if (use_ones) {
                    b = a * smw::Vector::ones(a.rows());
                    if (opts.criterion == smw::Criterion::error_vs_known) opts.known_solution = smw::Vector::ones(a.rows());
                } else {
                    b = smw::mm::read_vector_file(rhs_file);
                }
                const smw::SmwSplitting s = smw::splitting_from_difference(a, *m);
                report = smw::bench::run_method(solve_method, a, s, b, opts);
            }
            std::cout << smw::bench::report_to_json(report).dump(2) << '\n';
            return report.converged ? exit_ok : exit_not_converged;
        }

        if (*spectrum) {
            std::optional<smw::Stencil> override_m;
            if (!spec_circulant.empty()) override_m = smw::parse_stencil_literal(spec_circulant);
            const auto rep = smw::bench::spectrum_report(spec_problem, spec_n, override_m);
            std::cout << smw::bench::format_spectrum(rep);
            return rep.converges() ? exit_ok : exit_not_converged;
        }

        if (*dump) {
            for (const auto& path : smw::bench::dump_problem(dump_problem_name, dump_n, dump_dir)) {
                std::cout << path << '\n';
            }
            return exit_ok;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    }
    return exit_usage;
}
