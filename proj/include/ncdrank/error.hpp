#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ncdrank {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed edge-list or blocks input. `line()` is 1-based, 0 when the
/// error is not tied to a particular line (e.g. empty input).
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A decomposition that does not cover every node of the graph.
class CoverageError : public Error {
public:
    using Error::Error;
};

/// Input outside an operation's mathematical domain (negative entries,
/// non-stochastic rows, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

/// Invalid parameter combination (model weights, dangling policy, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A dense operation was asked for on a problem larger than its cap.
class CapExceededError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual) : Error(what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Teleportation-free ranking was requested but the indicator matrix is
/// reducible. Carries the strongly connected components of the block graph.
class ReducibleError : public Error {
public:
    ReducibleError(const std::string& what, std::vector<std::vector<std::size_t>> components)
        : Error(what), components_(std::move(components)) {}

    const std::vector<std::vector<std::size_t>>& components() const noexcept { return components_; }

private:
    std::vector<std::vector<std::size_t>> components_;
};

}  // namespace ncdrank
