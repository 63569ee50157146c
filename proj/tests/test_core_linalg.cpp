#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

using namespace smw;
using namespace smw_test;

namespace {

std::vector<Scalar> sorted(std::vector<Scalar> v) {
    std::sort(v.begin(), v.end(), [](const Scalar& a, const Scalar& b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return v;
}

} // namespace

TEST(Norm, Examples) {
    EXPECT_DOUBLE_EQ(norm(Vector{3.0, 4.0}, NormKind::two), 5.0);
    EXPECT_DOUBLE_EQ(norm(Vector{1.0, -7.0, 2.0}, NormKind::inf), 7.0);
    EXPECT_EQ(norm(Vector(6), NormKind::two), 0.0);
    EXPECT_EQ(norm(Vector(6), NormKind::inf), 0.0);
}

TEST(Norm, NoOverflowForHugeEntries) {
    EXPECT_DOUBLE_EQ(norm(Vector{3e300, 4e300}), 5e300);
    EXPECT_DOUBLE_EQ(norm(Vector{Scalar(0.0, 3e-300), 4e-300}), 5e-300);
}

TEST(Vector, BasicOps) {
    const Vector x{1.0, 2.0, 3.0};
    const Vector y{Scalar(0.0, 1.0), 1.0, 0.0};
    EXPECT_EQ(dot(x, y), Scalar(2.0, 1.0));
    EXPECT_EQ(dotc(y, y), Scalar(2.0, 0.0));
    EXPECT_EQ(stack(x, y).size(), 6u);
    EXPECT_EQ(slice(stack(x, y), 3, 3), y);
    EXPECT_THROW(x + Vector(2), DimensionError);
    EXPECT_THROW(slice(x, 2, 2), DimensionError);
}

TEST(CsrMatvec, IdentityExample) {
    const auto id = CsrMatrix::identity(5);
    const Vector x{1.0, 2.0, 3.0, 4.0, 5.0};
    EXPECT_EQ(csr_matvec(id, x), x);
}

TEST(CsrMatvec, TelescopingTridiagonal) {
    const std::array<Scalar, 3> bands{-0.5, 0.0, 0.5};
    const auto b = CsrMatrix::banded(4, bands);
    EXPECT_EQ(b.nnz(), 6u);  // zero diagonal is not stored
    const Vector y = b * Vector::ones(4);
    EXPECT_EQ(y, (Vector{0.5, 0.0, 0.0, -0.5}));
}

TEST(CsrMatvec, DimensionMismatch) {
    EXPECT_THROW(csr_matvec(CsrMatrix::identity(3), Vector(4)), DimensionError);
}

TEST(CsrMatrix, ConstructionInvariants) {
    EXPECT_THROW(CsrMatrix(2, 2, {0, 1}, {0}, {1.0}), DimensionError);                // offsets too short
    EXPECT_THROW(CsrMatrix(2, 2, {0, 2, 1}, {0, 1}, {1.0, 1.0}), DimensionError);     // non-monotone
    EXPECT_THROW(CsrMatrix(1, 2, {0, 2}, {1, 0}, {1.0, 1.0}), DimensionError);        // unsorted row
    EXPECT_THROW(CsrMatrix(1, 2, {0, 2}, {1, 1}, {1.0, 1.0}), DimensionError);        // duplicate
    EXPECT_THROW(CsrMatrix(1, 2, {0, 1}, {2}, {1.0}), DimensionError);                // column out of range
    EXPECT_NO_THROW(CsrMatrix(2, 2, {0, 1, 2}, {0, 1}, {0.0, 1.0}));                  // explicit zero allowed
}

TEST(CsrMatrix, TripletsCoalesce) {
    const auto a = CsrMatrix::from_triplets(2, 2, {{1, 1, 2.0}, {0, 0, 1.0}, {1, 1, 3.0}});
    EXPECT_EQ(a.nnz(), 2u);
    EXPECT_EQ(a.at(1, 1), Scalar(5.0));
    EXPECT_EQ(a.at(0, 1), Scalar(0.0));
}

TEST(CsrMatrix, NonzeroDiagonal) {
    const auto a = CsrMatrix::from_triplets(3, 3, {{0, 0, 1.0}, {1, 2, 1.0}, {2, 2, 1.0}});
    try {
        nonzero_diagonal(a);
        FAIL() << "expected SingularMatrixError";
    } catch (const SingularMatrixError& e) {
        EXPECT_EQ(e.index(), 1u);
    }
}

// Property: CSR matvec agrees with the dense product on the densified matrix.
TEST(CsrMatvec, AgreesWithDenseOnRandomInstances) {
    auto g = rng(101);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t rows = uniform_index(g, 1, 50);
        const std::size_t cols = uniform_index(g, 1, 50);
        const auto a = CsrMatrix::from_triplets(rows, cols, random_triplets(g, rows, cols, uniform(g, 0.0, 0.4)));
        const Vector x = random_vector(g, cols, true);
        const Vector sparse = a * x;
        const Vector dense = a.to_dense() * x;
        for (std::size_t i = 0; i < rows; ++i) {
            EXPECT_LE(std::abs(sparse[i] - dense[i]), 1e-12 * std::max(1.0, std::abs(dense[i]))) << "trial " << trial;
        }
    }
}

TEST(CsrMatrix, BlockAssemble) {
    const auto a = CsrMatrix::identity(2);
    const auto b = CsrMatrix::from_triplets(2, 1, {{0, 0, 7.0}});
    const auto c = CsrMatrix::from_triplets(1, 2, {{0, 1, 8.0}});
    const auto d = CsrMatrix::from_triplets(1, 1, {{0, 0, 9.0}});
    const auto k = block_assemble(a, b, c, d);
    EXPECT_EQ(k.rows(), 3u);
    EXPECT_EQ(k.at(0, 2), Scalar(7.0));
    EXPECT_EQ(k.at(2, 1), Scalar(8.0));
    EXPECT_EQ(k.at(2, 2), Scalar(9.0));
    EXPECT_THROW(block_assemble(a, d, c, d), DimensionError);
}

TEST(DenseEigenvalues, Examples) {
    const auto e1 = sorted(dense_eigenvalues(DenseMatrix{{3.0, 0.0, 0.0}, {0.0, -1.0, 0.0}, {0.0, 0.0, 0.0}}));
    ASSERT_EQ(e1.size(), 3u);
    EXPECT_NEAR(std::abs(e1[0] - Scalar(-1.0)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(e1[1] - Scalar(0.0)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(e1[2] - Scalar(3.0)), 0.0, 1e-12);

    const auto e2 = sorted(dense_eigenvalues(DenseMatrix{{0.0, 1.0}, {1.0, 0.0}}));
    EXPECT_NEAR(std::abs(e2[0] - Scalar(-1.0)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(e2[1] - Scalar(1.0)), 0.0, 1e-12);

    const auto e3 = sorted(dense_eigenvalues(DenseMatrix{{2.0, 1.0}, {1.0, 2.0}}));
    EXPECT_NEAR(std::abs(e3[0] - Scalar(1.0)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(e3[1] - Scalar(3.0)), 0.0, 1e-12);
}

TEST(DenseEigenvalues, Errors) {
    EXPECT_THROW(dense_eigenvalues(DenseMatrix(2, 3)), DimensionError);
    EXPECT_THROW(dense_eigenvalues(DenseMatrix::identity(10), 8), CapacityError);
}

// Property: each eigenvalue has a residual certificate ||A w - lambda w|| <= 1e-8 ||A||
// with w from inverse iteration on the shifted matrix.
TEST(DenseEigenvalues, ResidualBound) {
    auto g = rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = uniform_index(g, 2, 12);
        const DenseMatrix a = random_dense(g, n, n, true);
        const double scale = a.norm_inf();
        for (const Scalar lambda : dense_eigenvalues(a)) {
            DenseMatrix shifted = a - lambda * DenseMatrix::identity(n);
            for (std::size_t i = 0; i < n; ++i) shifted(i, i) += Scalar(1e-10 * scale);
            Vector w = random_vector(g, n, true);
            for (int it = 0; it < 3; ++it) {
                w = dense_lu_solve(shifted, w);
                w = (1.0 / norm(w)) * w;
            }
            EXPECT_LE(norm(a * w - lambda * w), 1e-8 * scale);
        }
    }
}

// Property: A^T A has real, nonnegative spectrum.
TEST(DenseEigenvalues, GramMatrixIsRealNonnegative) {
    auto g = rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = uniform_index(g, 1, 20);
        const DenseMatrix a = random_dense(g, n, n);
        for (const Scalar lambda : dense_eigenvalues(a.transpose() * a)) {
            EXPECT_LE(std::abs(lambda.imag()), 1e-8);
            EXPECT_GE(lambda.real(), -1e-8);
        }
    }
}

// Property: similarity by a permutation leaves the spectrum unchanged.
TEST(DenseEigenvalues, PermutationInvariance) {
    auto g = rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = uniform_index(g, 1, 16);
        const DenseMatrix a = random_dense(g, n, n);
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), g);
        DenseMatrix pa(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) pa(i, j) = a(perm[i], perm[j]);
        const auto ea = dense_eigenvalues(a);
        const auto eb = dense_eigenvalues(pa);
        EXPECT_LE(hausdorff_distance(ea, eb), 1e-8);
    }
}

TEST(DenseLuSolve, Examples) {
    const Vector b{1.5, -2.0, Scalar(0.0, 3.0)};
    EXPECT_EQ(dense_lu_solve(DenseMatrix::identity(3), b), b);
    const Vector x = dense_lu_solve(2.0 * DenseMatrix::identity(3), Vector{2.0, 4.0, 6.0});
    EXPECT_EQ(x, (Vector{1.0, 2.0, 3.0}));

    const DenseMatrix demo{{5.0, 3.0, 2.0, 2.0}, {1.0, 4.0, 3.0, 2.0}, {2.0, 1.0, 4.0, 3.0}, {4.0, 2.0, 1.0, 5.0}};
    const Vector ones = Vector::ones(4);
    EXPECT_LE(max_diff(dense_lu_solve(demo, demo * ones), ones), 1e-12);
}

TEST(DenseLuSolve, NeedsPivoting) {
    const DenseMatrix a{{0.0, 1.0}, {1.0, 0.0}};
    EXPECT_EQ(dense_lu_solve(a, Vector{2.0, 3.0}), (Vector{3.0, 2.0}));
}

TEST(DenseLuSolve, SingularPivot) {
    const DenseMatrix a{{1.0, 2.0}, {2.0, 4.0}};
    EXPECT_THROW(dense_lu_solve(a, Vector{1.0, 1.0}), SingularMatrixError);
    EXPECT_EQ(determinant(a), Scalar(0.0));
}

TEST(DenseLuSolve, Determinant) {
    EXPECT_NEAR(std::abs(determinant(DenseMatrix{{0.0, 1.0}, {1.0, 0.0}}) - Scalar(-1.0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(determinant(DenseMatrix{{2.0, 1.0}, {1.0, 2.0}}) - Scalar(3.0)), 0.0, 1e-15);
    EXPECT_EQ(determinant(DenseMatrix(0, 0)), Scalar(1.0));
}

// Property: LU solve reproduces b on random well-conditioned systems.
TEST(DenseLuSolve, ResidualOnRandomSystems) {
    auto g = rng(17);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = uniform_index(g, 1, 64);
        const DenseMatrix a = random_well_conditioned(g, n, trial % 2 == 0);
        const Vector b = random_vector(g, n, true);
        const Vector x = dense_lu_solve(a, b);
        EXPECT_LE(norm(a * x - b), 1e-10 * norm(b));
    }
}

TEST(Hausdorff, Basics) {
    const std::vector<Scalar> a{1.0, 2.0};
    const std::vector<Scalar> b{1.0, 2.5};
    EXPECT_DOUBLE_EQ(hausdorff_distance(a, b), 0.5);
    EXPECT_DOUBLE_EQ(hausdorff_distance(a, a), 0.0);
}
