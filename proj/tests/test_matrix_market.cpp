#include "support.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace smw;
using namespace smw_test;

namespace {

CsrMatrix parse(const std::string& text) {
    std::istringstream in(text);
    return mm::read_matrix(in);
}

std::size_t parse_error_line(const std::string& text) {
    try {
        parse(text);
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;
}

} // namespace

TEST(MatrixMarket, ReadsRealGeneral) {
    const auto a = parse("%%MatrixMarket matrix coordinate real general\n% comment\n2 3 2\n1 1 1.5\n2 3 -2\n");
    EXPECT_EQ(a.rows(), 2u);
    EXPECT_EQ(a.cols(), 3u);
    EXPECT_EQ(a.at(0, 0), Scalar(1.5));
    EXPECT_EQ(a.at(1, 2), Scalar(-2.0));
}

TEST(MatrixMarket, ReadsComplexAndSymmetric) {
    const auto c = parse("%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 -2\n");
    EXPECT_EQ(c.at(0, 0), Scalar(1.0, -2.0));
    const auto s = parse("%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 4\n2 1 3\n");
    EXPECT_EQ(s.at(0, 1), Scalar(3.0));
    EXPECT_EQ(s.at(1, 0), Scalar(3.0));
    const auto k = parse("%%MatrixMarket matrix coordinate integer skew-symmetric\n2 2 1\n2 1 3\n");
    EXPECT_EQ(k.at(0, 1), Scalar(-3.0));
    const auto p = parse("%%MatrixMarket matrix coordinate pattern general\n2 2 1\n2 1\n");
    EXPECT_EQ(p.at(1, 0), Scalar(1.0));
}

TEST(MatrixMarket, MalformedHeaderNamesLineOne) {
    EXPECT_EQ(parse_error_line("%%MatrixMarket matrix banana real general\n2 2 1\n1 1 1\n"), 1u);
    EXPECT_EQ(parse_error_line("hello\n"), 1u);
    EXPECT_EQ(parse_error_line(""), 1u);
}

TEST(MatrixMarket, ErrorsCarryLineNumbers) {
    EXPECT_EQ(parse_error_line("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n3 1 1\n"), 4u);
    EXPECT_EQ(parse_error_line("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n"), 4u);
    EXPECT_EQ(parse_error_line("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 x\n"), 3u);
    EXPECT_EQ(parse_error_line("%%MatrixMarket matrix coordinate real general\n2 2\n"), 2u);
}

// Property: write then read reproduces the matrix bit for bit.
TEST(MatrixMarket, RoundTripRandom) {
    auto g = rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t rows = uniform_index(g, 1, 20);
        const std::size_t cols = uniform_index(g, 1, 20);
        auto t = random_triplets(g, rows, cols, 0.3);
        if (trial % 2 == 0)
            for (auto& e : t) e.value = e.value.real();
        const auto a = CsrMatrix::from_triplets(rows, cols, t);
        std::stringstream buf;
        mm::write_matrix(buf, a);
        EXPECT_EQ(mm::read_matrix(buf), a);
    }
}

TEST(MatrixMarket, VectorRoundTrip) {
    auto g = rng(29);
    const Vector v = random_vector(g, 17);
    std::stringstream buf;
    mm::write_vector(buf, v);
    EXPECT_NE(buf.str().find("array real"), std::string::npos);
    EXPECT_EQ(mm::read_vector(buf), v);

    const Vector c = random_vector(g, 5, true);
    std::stringstream cbuf;
    mm::write_vector(cbuf, c);
    EXPECT_EQ(mm::read_vector(cbuf), c);
}
