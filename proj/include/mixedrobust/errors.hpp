#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mixedrobust {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// All coefficients below the leading tolerance.
class ZeroPolynomialError : public Error {
public:
    ZeroPolynomialError() : Error("zero polynomial: all coefficients below leading tolerance") {}
};

class SyntaxError : public Error {
public:
    SyntaxError(const std::string& msg, std::size_t offset)
        : Error(msg + " (at byte " + std::to_string(offset) + ")"), offset(offset) {}
    std::size_t offset;
};

class UnknownVariableError : public Error {
public:
    UnknownVariableError(const std::string& name, std::size_t offset)
        : Error("unknown variable '" + name + "' (at byte " + std::to_string(offset) + ")"),
          offset(offset) {}
    std::size_t offset;
};

class DivisionByZeroError : public Error {
public:
    explicit DivisionByZeroError(const std::string& fragment)
        : Error("division by zero while evaluating '" + fragment + "'"), fragment(fragment) {}
    std::string fragment;
};

class DimensionMismatchError : public Error {
public:
    using Error::Error;
};

class MethodInapplicableError : public Error {
public:
    using Error::Error;
};

class InvalidParamsError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class DimensionTooHighError : public Error {
public:
    using Error::Error;
};

class NotDiscreteError : public Error {
public:
    using Error::Error;
};

class UnboundedSupportError : public Error {
public:
    using Error::Error;
};

class DegeneratePolygonError : public Error {
public:
    using Error::Error;
};

class EmptySetError : public Error {
public:
    using Error::Error;
};

/// Configuration file problems (missing fields, schema violations).
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace mixedrobust
