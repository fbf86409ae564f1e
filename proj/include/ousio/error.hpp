#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ousio {

/// Broad failure class; the command-line tool maps each to an exit code.
enum class ErrorKind {
    io,      ///< unreadable or malformed input
    numeric, ///< degenerate or rank-deficient data
    lookup,  ///< a requested term is not in the lexicon
    usage,   ///< an argument violates a precondition
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

class MalformedRow : public Error {
public:
    MalformedRow(std::size_t line, const std::string& detail)
        : Error(ErrorKind::io, "malformed row at line " + std::to_string(line) + ": " + detail),
          line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ScoreOutOfRange : public Error {
public:
    explicit ScoreOutOfRange(const std::string& term)
        : Error(ErrorKind::io, "score out of range [0,1] for term '" + term + "'"), term_(term) {}
    const std::string& term() const noexcept { return term_; }

private:
    std::string term_;
};

class DuplicateTerm : public Error {
public:
    explicit DuplicateTerm(const std::string& term)
        : Error(ErrorKind::io, "duplicate term '" + term + "'"), term_(term) {}
    const std::string& term() const noexcept { return term_; }

private:
    std::string term_;
};

class DegenerateColumn : public Error {
public:
    explicit DegenerateColumn(const std::string& column)
        : Error(ErrorKind::numeric, "degenerate column '" + column + "' has zero variance") {}
};

class RankDeficient : public Error {
public:
    explicit RankDeficient(const std::string& detail)
        : Error(ErrorKind::numeric, "rank deficient score matrix: " + detail) {}
};

class Degenerate : public Error {
public:
    explicit Degenerate(const std::string& detail) : Error(ErrorKind::numeric, "degenerate input: " + detail) {}
};

class EmptyInput : public Error {
public:
    explicit EmptyInput(const std::string& what) : Error(ErrorKind::numeric, "empty input: " + what) {}
};

class WrongFramework : public Error {
public:
    explicit WrongFramework(const std::string& detail) : Error(ErrorKind::usage, "wrong framework: " + detail) {}
};

class UnknownTerm : public Error {
public:
    explicit UnknownTerm(const std::string& term)
        : Error(ErrorKind::lookup, "unknown term '" + term + "'"), term_(term) {}
    const std::string& term() const noexcept { return term_; }

private:
    std::string term_;
};

class NoOverlap : public Error {
public:
    NoOverlap() : Error(ErrorKind::lookup, "no corpus term is present in the lexicon") {}
};

class AllEmpty : public Error {
public:
    AllEmpty() : Error(ErrorKind::numeric, "every slice is empty") {}
};

class WindowTooSmall : public Error {
public:
    explicit WindowTooSmall(const std::string& detail) : Error(ErrorKind::usage, "smoothing window too small: " + detail) {}
};

class MisalignedSeries : public Error {
public:
    explicit MisalignedSeries(const std::string& detail) : Error(ErrorKind::usage, "misaligned series: " + detail) {}
};

class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& detail) : Error(ErrorKind::usage, detail) {}
};

} // namespace ousio
