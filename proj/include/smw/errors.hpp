#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace smw {

/// Operand shapes do not agree.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A factorization or FFT solve hit a (numerically) zero pivot/eigenvalue.
class SingularMatrixError : public std::runtime_error {
public:
    explicit SingularMatrixError(const std::string& what, std::size_t index = npos)
        : std::runtime_error(what), index_(index) {}

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    /// Offending pivot row or Fourier index, npos when unknown.
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// A dense oracle was asked to work above the small-instance cap.
class CapacityError : public std::length_error {
public:
    using std::length_error::length_error;
};

class EigenSolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Unknown names or inconsistent settings in a solver / bench configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr std::size_t default_small_cap = 512;

} // namespace smw
