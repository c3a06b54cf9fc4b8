// SPDX-License-Identifier: MIT
#pragma once

#include <stdexcept>
#include <string>

namespace pencilbench {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class NonFiniteInput : public Error {
public:
    using Error::Error;
};

class ZeroInput : public Error {
public:
    using Error::Error;
};

class RankDeficient : public Error {
public:
    using Error::Error;
};

/// S2 of the pencil is numerically singular.
class SingularPencil : public Error {
public:
    using Error::Error;
};

/// The pencil has a complex-conjugate eigenpair above the imaginary tolerance.
class ComplexEigenvalues : public Error {
public:
    using Error::Error;
};

class RetriesExhausted : public Error {
public:
    using Error::Error;
};

class RankTooLarge : public Error {
public:
    using Error::Error;
};

class DegenerateCompression : public Error {
public:
    using Error::Error;
};

class CombinatorialBudgetExceeded : public Error {
public:
    using Error::Error;
};

class ConvergenceFailure : public Error {
public:
    using Error::Error;
};

/// Malformed input file; `line` is 1-based, 0 when not attributable to a line.
class FormatError : public Error {
public:
    FormatError(const std::string& what, std::size_t line)
        : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace pencilbench
