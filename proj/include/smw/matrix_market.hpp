#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "csr.hpp"
#include "errors.hpp"
#include "vector.hpp"

/**
 * @file matrix_market.hpp
 *
 * @brief Read and write the Matrix Market exchange format.
 *
 * Sparse matrices use the coordinate layout (1-based indices). Right-hand
 * sides and solutions use the dense array layout with a single column.
 * Both real and complex fields are supported; `integer` and `pattern`
 * fields are accepted on input.
 */

namespace smw::mm {

enum class Field { real, integer, complex, pattern };
enum class Symmetry { general, symmetric, skew_symmetric, hermitian };

struct Header {
    bool coordinate = true;
    Field field = Field::real;
    Symmetry symmetry = Symmetry::general;
};

namespace detail {

inline std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

inline Header parse_banner(const std::string& line) {
    std::istringstream in(line);
    std::string banner, object, format, field, symmetry;
    in >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket") throw ParseError("missing %%MatrixMarket banner", 1);
    if (lower(object) != "matrix") throw ParseError("unsupported object '" + object + "'", 1);

    Header h;
    format = lower(format);
    if (format == "coordinate") {
        h.coordinate = true;
    } else if (format == "array") {
        h.coordinate = false;
    } else {
        throw ParseError("unsupported format '" + format + "'", 1);
    }

    field = lower(field);
    if (field == "real" || field == "double") {
        h.field = Field::real;
    } else if (field == "integer") {
        h.field = Field::integer;
    } else if (field == "complex") {
        h.field = Field::complex;
    } else if (field == "pattern") {
        h.field = Field::pattern;
    } else {
        throw ParseError("unsupported field '" + field + "'", 1);
    }
    if (!h.coordinate && h.field == Field::pattern) throw ParseError("pattern field requires coordinate format", 1);

    symmetry = lower(symmetry);
    if (symmetry == "general") {
        h.symmetry = Symmetry::general;
    } else if (symmetry == "symmetric") {
        h.symmetry = Symmetry::symmetric;
    } else if (symmetry == "skew-symmetric") {
        h.symmetry = Symmetry::skew_symmetric;
    } else if (symmetry == "hermitian") {
        h.symmetry = Symmetry::hermitian;
    } else {
        throw ParseError("unsupported symmetry '" + symmetry + "'", 1);
    }
    return h;
}

/// Line reader that skips comments and blank lines and tracks line numbers.
class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    bool next(std::string& line) {
        while (std::getline(in_, line)) {
            ++line_no_;
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos || line[first] == '%') continue;
            return true;
        }
        return false;
    }

    std::size_t line_no() const noexcept { return line_no_; }

    bool read_banner(std::string& line) {
        if (!std::getline(in_, line)) return false;
        line_no_ = 1;
        return true;
    }

private:
    std::istream& in_;
    std::size_t line_no_ = 0;
};

inline Scalar read_value(std::istringstream& in, Field field, std::size_t line) {
    double re = 1.0;
    double im = 0.0;
    if (field == Field::pattern) return 1.0;
    if (!(in >> re)) throw ParseError("expected a numeric value", line);
    if (field == Field::complex && !(in >> im)) throw ParseError("expected an imaginary part", line);
    return {re, im};
}

inline void expect_line_end(std::istringstream& in, std::size_t line) {
    std::string rest;
    if (in >> rest) throw ParseError("unexpected trailing token '" + rest + "'", line);
}

inline void write_value(std::ostream& out, const Scalar& z, bool complex) {
    out << z.real();
    if (complex) out << ' ' << z.imag();
}

inline bool any_imaginary(std::span<const Scalar> v) {
    return std::any_of(v.begin(), v.end(), [](const Scalar& z) { return z.imag() != 0.0; });
}

} // namespace detail

/// Parse a coordinate-format sparse matrix. Symmetric variants are expanded.
inline CsrMatrix read_matrix(std::istream& in) {
    detail::LineReader reader(in);
    std::string line;
    if (!reader.read_banner(line)) throw ParseError("empty input", 1);
    const Header h = detail::parse_banner(line);
    if (!h.coordinate) throw ParseError("expected coordinate format for a sparse matrix", 1);

    if (!reader.next(line)) throw ParseError("missing size line", reader.line_no() + 1);
    std::size_t rows = 0, cols = 0, entries = 0;
    {
        std::istringstream s(line);
        if (!(s >> rows >> cols >> entries)) throw ParseError("malformed size line", reader.line_no());
        detail::expect_line_end(s, reader.line_no());
    }

    std::vector<Triplet> triplets;
    triplets.reserve(h.symmetry == Symmetry::general ? entries : 2 * entries);
    for (std::size_t e = 0; e < entries; ++e) {
        if (!reader.next(line)) {
            throw ParseError("expected " + std::to_string(entries) + " entries, found " + std::to_string(e),
                             reader.line_no() + 1);
        }
        std::istringstream s(line);
        long long i = 0, j = 0;
        if (!(s >> i >> j)) throw ParseError("malformed entry indices", reader.line_no());
        if (i < 1 || j < 1 || static_cast<std::size_t>(i) > rows || static_cast<std::size_t>(j) > cols) {
            throw ParseError("entry index out of range", reader.line_no());
        }
        const Scalar v = detail::read_value(s, h.field, reader.line_no());
        detail::expect_line_end(s, reader.line_no());
        const auto r = static_cast<std::size_t>(i - 1);
        const auto c = static_cast<std::size_t>(j - 1);
        triplets.push_back({r, c, v});
        if (r != c) {
            switch (h.symmetry) {
                case Symmetry::general: break;
                case Symmetry::symmetric: triplets.push_back({c, r, v}); break;
                case Symmetry::skew_symmetric: triplets.push_back({c, r, -v}); break;
                case Symmetry::hermitian: triplets.push_back({c, r, std::conj(v)}); break;
            }
        }
    }
    if (reader.next(line)) throw ParseError("more entries than declared", reader.line_no());
    return CsrMatrix::from_triplets(rows, cols, std::move(triplets));
}

/// Parse a single-column array-format file into a vector.
inline Vector read_vector(std::istream& in) {
    detail::LineReader reader(in);
    std::string line;
    if (!reader.read_banner(line)) throw ParseError("empty input", 1);
    const Header h = detail::parse_banner(line);
    if (h.coordinate) throw ParseError("expected array format for a vector", 1);
    if (!reader.next(line)) throw ParseError("missing size line", reader.line_no() + 1);
    std::size_t rows = 0, cols = 0;
    {
        std::istringstream s(line);
        if (!(s >> rows >> cols)) throw ParseError("malformed size line", reader.line_no());
        detail::expect_line_end(s, reader.line_no());
    }
    if (cols != 1) throw ParseError("vector files must have exactly one column", reader.line_no());
    Vector v(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!reader.next(line)) throw ParseError("expected " + std::to_string(rows) + " values", reader.line_no() + 1);
        std::istringstream s(line);
        v[i] = detail::read_value(s, h.field, reader.line_no());
        detail::expect_line_end(s, reader.line_no());
    }
    return v;
}

/// Writes `real` unless some stored value has a nonzero imaginary part.
inline void write_matrix(std::ostream& out, const CsrMatrix& a) {
    const bool complex = detail::any_imaginary(a.values());
    out << "%%MatrixMarket matrix coordinate " << (complex ? "complex" : "real") << " general\n";
    out << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (const auto& t : a.triplets()) {
        out << t.row + 1 << ' ' << t.col + 1 << ' ';
        detail::write_value(out, t.value, complex);
        out << '\n';
    }
}

inline void write_vector(std::ostream& out, const Vector& v) {
    const bool complex = detail::any_imaginary(v.span());
    out << "%%MatrixMarket matrix array " << (complex ? "complex" : "real") << " general\n";
    out << v.size() << " 1\n";
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (const auto& z : v) {
        detail::write_value(out, z, complex);
        out << '\n';
    }
}

inline CsrMatrix read_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_matrix(in);
}

inline Vector read_vector_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_vector(in);
}

inline void write_matrix_file(const std::string& path, const CsrMatrix& a) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    write_matrix(out, a);
}

inline void write_vector_file(const std::string& path, const Vector& v) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    write_vector(out, v);
}

} // namespace smw::mm
