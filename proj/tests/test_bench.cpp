#include "support.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

using namespace smw;
using namespace smw::bench;
using namespace smw_test;

namespace {

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("smw_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

} // namespace

TEST(RunBench, Demo4Counts) {
    BenchConfig cfg;
    cfg.problem = "demo4";
    cfg.methods = {"smw", "esmw", "gauss_seidel", "gmres"};
    cfg.repeats = 1;
    apply_reference_protocol(cfg);
    const auto rows = run_bench(cfg);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_NEAR(static_cast<double>(rows[0].iterations), 20.0, 4.0);
    EXPECT_NEAR(static_cast<double>(rows[1].iterations), 14.0, 4.0);
    EXPECT_NEAR(static_cast<double>(rows[2].iterations), 78.0, 8.0);
    EXPECT_NEAR(static_cast<double>(rows[3].iterations), 3.0, 1.0);
    ASSERT_TRUE(rows[1].omega.has_value());
    EXPECT_EQ(*rows[1].omega, 0.7);
    for (const auto& r : rows) {
        EXPECT_TRUE(r.converged);
        EXPECT_EQ(r.n, 4u);
        EXPECT_EQ(r.problem, "demo4");
    }
}

TEST(RunBench, SameCountAcrossSizes) {
    BenchConfig cfg;
    cfg.problem = "linear";
    cfg.sizes = {1000, 10000};
    cfg.methods = {"smw"};
    cfg.repeats = 1;
    // the 2-norm scales with sqrt(n); the infinity-norm increment rule is scale-free
    apply_reference_protocol(cfg);
    const auto rows = run_bench(cfg);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].iterations, rows[1].iterations);
}

TEST(RunBench, UnknownNamesListValidOnes) {
    BenchConfig cfg;
    cfg.methods = {"nonexistent"};
    try {
        run_bench(cfg);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("smw, esmw, jacobi, gauss_seidel, gmres, block_jacobi_smw, block_gs_smw"),
                  std::string::npos);
    }
    cfg.methods = {"smw"};
    cfg.problem = "quartic";
    EXPECT_THROW(run_bench(cfg), ConfigError);
}

TEST(RunBench, BlockMethodsOnlyOnMixed) {
    BenchConfig cfg;
    cfg.problem = "linear";
    cfg.methods = {"block_jacobi_smw"};
    cfg.repeats = 1;
    EXPECT_THROW(run_bench(cfg), ConfigError);
    cfg.problem = "mixed";
    cfg.methods = {"smw"};
    EXPECT_THROW(run_bench(cfg), ConfigError);
    cfg.methods = {"gmres"};
    cfg.sizes = {50};
    EXPECT_NO_THROW(run_bench(cfg));
}

TEST(RunBench, ConfigValidation) {
    BenchConfig cfg;
    cfg.sizes.clear();
    EXPECT_THROW(cfg.check(), ConfigError);
    cfg = {};
    cfg.methods.clear();
    EXPECT_THROW(cfg.check(), ConfigError);
    cfg = {};
    cfg.repeats = 0;
    EXPECT_THROW(cfg.check(), ConfigError);
}

TEST(RunBench, Reproducible) {
    BenchConfig cfg;
    cfg.problem = "cubic";
    cfg.sizes = {100};
    cfg.methods = {"smw", "gauss_seidel", "gmres"};
    cfg.repeats = 1;
    auto a = run_bench(cfg);
    auto b = run_bench(cfg);
    for (auto* rows : {&a, &b})
        for (auto& r : *rows) r.wall_seconds = 0.0;
    EXPECT_EQ(a, b);
    EXPECT_EQ(emit_table(a, Format::md), emit_table(b, Format::md));
}

TEST(EmitTable, CsvOneRow) {
    BenchRow r{"linear", "smw", 1000, 18, true, false, 5e-9, 0.01, 1e-8, "increment", std::nullopt};
    const auto text = emit_table({r});
    EXPECT_EQ(count_lines(text), 2u);
    EXPECT_EQ(text, emit_table({r}, parse_format("")));
    EXPECT_EQ(text.substr(0, text.find("\r\n")),
              "problem,method,n,iterations,converged,diverged,final_metric,wall_seconds,tol,criterion,omega");
}

TEST(EmitTable, CsvQuoting) {
    BenchRow r{"odd,\"name\"", "smw", 4, 1, true, false, 0.0, 0.0, 1e-8, "increment", 1.5};
    const auto text = emit_table({r});
    EXPECT_NE(text.find("\"odd,\"\"name\"\"\""), std::string::npos);
}

TEST(EmitTable, MarkdownLayout) {
    std::vector<BenchRow> rows;
    for (std::size_t n : {1000u, 10000u}) {
        for (const auto* m : {"gauss_seidel", "gmres", "smw", "esmw"}) {
            rows.push_back({"linear", m, n, 18, true, false, 1e-9, 0.0071, 1e-8, "increment", std::nullopt});
        }
    }
    const auto md = emit_table(rows, Format::md);
    EXPECT_EQ(md.substr(0, md.find('\n')), "| n | Gauss-Seidel | GMRES | SMW | eSMW |");
    EXPECT_NE(md.find("| 1000 | 0.0071(18) |"), std::string::npos);
    EXPECT_EQ(count_lines(md), 4u);
}

TEST(EmitTable, JsonRoundTrip) {
    auto g = rng(109);
    std::vector<BenchRow> rows;
    for (int i = 0; i < 10; ++i) {
        BenchRow r{"linear", "esmw", uniform_index(g, 1, 100000), uniform_index(g, 0, 10000), i % 2 == 0, i % 3 == 0,
                   uniform(g, 0.0, 1.0), uniform(g, 0.0, 5.0), 1e-8, "relative_residual", std::nullopt};
        if (i % 2 == 1) r.omega = uniform(g, 0.1, 2.0);
        rows.push_back(r);
    }
    EXPECT_EQ(rows_from_json(emit_table(rows, Format::json)), rows);
}

TEST(ConfigFromJson, FieldsAndProtocol) {
    const auto cfg = config_from_json(json::parse(R"({"problem": "cubic", "sizes": [100, 200],
        "methods": ["smw", "gmres"], "protocol": "reference", "format": "md", "omega": 1.86, "repeats": 2})"));
    EXPECT_EQ(cfg.problem, "cubic");
    EXPECT_EQ(cfg.sizes, (std::vector<std::size_t>{100, 200}));
    EXPECT_EQ(cfg.criterion, Criterion::increment);
    EXPECT_EQ(cfg.norm_kind, NormKind::inf);
    EXPECT_EQ(cfg.gmres_tol, 1e-10);
    EXPECT_EQ(cfg.format, Format::md);
    EXPECT_EQ(cfg.omega, 1.86);
    EXPECT_EQ(cfg.repeats, 2u);
    EXPECT_THROW(config_from_json(json::parse(R"({"format": "xml"})")), ConfigError);
}

TEST(ReportJson, Schema) {
    const auto p = demo4_problem();
    SolveOptions o;
    o.omega = 0.7;
    const auto j = report_to_json(esmw_iterate(p.splitting, p.rhs, o));
    for (const auto* key : {"method", "n", "iterations", "converged", "final_metric", "wall_seconds", "tol", "criterion",
                            "omega"}) {
        EXPECT_TRUE(j.contains(key)) << key;
    }
    EXPECT_EQ(j["omega"], 0.7);
    EXPECT_FALSE(report_to_json(smw_iterate(p.splitting, p.rhs)).contains("omega"));
}

TEST(SpectrumReport, Demo4) {
    const auto rep = spectrum_report("demo4", 4);
    ASSERT_TRUE(rep.rho_low_rank.has_value());
    EXPECT_NEAR(*rep.rho_low_rank, 0.35, 1e-12);
    EXPECT_NEAR(rep.rho_dense, 0.35, 1e-9);
    ASSERT_TRUE(rep.coincidence_distance.has_value());
    EXPECT_LE(*rep.coincidence_distance, 1e-9);
    EXPECT_TRUE(rep.converges());
    EXPECT_NE(format_spectrum(rep).find("rho(V^T M^-1 U): 0.35"), std::string::npos);
}

TEST(SpectrumReport, LinearAndMisSpecified) {
    EXPECT_TRUE(spectrum_report("linear", 16).converges());
    const auto bad = spectrum_report("cubic", 32, parse_stencil_literal("[1]"));
    EXPECT_GE(bad.rho_dense, 1.0);
    EXPECT_FALSE(bad.converges());
    EXPECT_NE(format_spectrum(bad).find("rho >= 1"), std::string::npos);
    EXPECT_THROW(spectrum_report("linear", 600), CapacityError);
}

// Export demo4, read it back and solve from files: identical report to the in-memory run.
TEST(Dump, Demo4RoundTrip) {
    const auto dir = scratch_dir("dump_demo4");
    const auto files = dump_problem("demo4", 4, dir);
    EXPECT_EQ(files.size(), 7u);  // A M N rhs exact U V

    const auto a = mm::read_matrix_file((dir / "A.mtx").string());
    const auto b = mm::read_vector_file((dir / "rhs.mtx").string());
    const auto m = Circulant::from_first_row(Vector::from_real(parse_number_list("4,3,2,1")));
    const auto from_files = run_method("smw", a, splitting_from_difference(a, m), b, SolveOptions{});

    const auto p = demo4_problem();
    const auto in_memory = run_method("smw", p, SolveOptions{});
    EXPECT_EQ(from_files.iterations, in_memory.iterations);
    EXPECT_EQ(from_files.final_metric, in_memory.final_metric);
    EXPECT_EQ(from_files.solution, in_memory.solution);
    EXPECT_EQ(mm::read_matrix_file((dir / "N.mtx").string()), p.splitting.n_mat());
    std::filesystem::remove_all(dir);
}

TEST(Dump, MixedWritesBlocks) {
    const auto dir = scratch_dir("dump_mixed");
    const auto files = dump_problem("mixed", 10, dir);
    EXPECT_EQ(files.size(), 11u);
    EXPECT_EQ(mm::read_matrix_file((dir / "K.mtx").string()), mixed_formulation_problem(10).system.assemble());
    std::filesystem::remove_all(dir);
}
