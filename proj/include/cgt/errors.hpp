#pragma once

#include <stdexcept>
#include <string>

namespace cgt {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// graph
class ConnectivityError : public Error {
public:
    using Error::Error;
};
class WeightError : public Error {
public:
    using Error::Error;
};
class NoConvergence : public Error {
public:
    using Error::Error;
};

// objective
class DimensionMismatch : public Error {
public:
    using Error::Error;
};
class NonFiniteInput : public Error {
public:
    using Error::Error;
};
class EmptyInput : public Error {
public:
    using Error::Error;
};
class NonPositiveC : public Error {
public:
    using Error::Error;
};
class UnknownMinimum : public Error {
public:
    using Error::Error;
};

// data
class ParseError : public Error {
public:
    ParseError(long line, const std::string& reason)
        : Error("parse error at line " + std::to_string(line) + ": " + reason), line(line), reason(reason) {}
    long line;
    std::string reason;
};
class TooManyAgents : public Error {
public:
    using Error::Error;
};

// algo
class NonFiniteState : public Error {
public:
    NonFiniteState(long iteration, const std::string& what)
        : Error("non-finite state at iteration " + std::to_string(iteration) + ": " + what),
          iteration(iteration) {}
    long iteration;
};

// cli
class ConfigError : public Error {
public:
    ConfigError(const std::string& field, const std::string& reason)
        : Error("config error [" + field + "]: " + reason), field(field) {}
    std::string field;
};
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace cgt
