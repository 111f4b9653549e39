#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace pencilcrt {

enum class ErrorKind {
    InvalidArgument,
    InsufficientSamples,
    OrderDeficient,
    DegenerateBasis,
    Cardinality,
    InvalidComponent,
    NoCandidate,
    Ambiguous,
    Precondition,
    Io,
};

const char* to_string(ErrorKind kind) noexcept;

/// Base for every failure raised by the library. The kind lets callers
/// (the benchmark harness, the CLI) turn a failure into a tag or exit code
/// without catching each subclass.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// The pencil's numerical rank fell below the requested model order.
class OrderDeficientError : public Error {
public:
    OrderDeficientError(std::size_t requested, std::size_t achieved);

    std::size_t requested() const noexcept { return requested_; }
    std::size_t achieved_rank() const noexcept { return achieved_; }

private:
    std::size_t requested_;
    std::size_t achieved_;
};

/// More than one well-separated fold-index solution was consistent with a
/// pair of aliases. Carries every consistent frequency, ascending.
class AmbiguityError : public Error {
public:
    AmbiguityError(std::vector<double> candidates_hz, const std::string& what)
        : Error(ErrorKind::Ambiguous, what), candidates_(std::move(candidates_hz)) {}

    const std::vector<double>& candidates_hz() const noexcept { return candidates_; }

private:
    std::vector<double> candidates_;
};

}  // namespace pencilcrt
