#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace riskdyn {

/// Base of every error raised by the library. The CLI maps each subclass to
/// one diagnostic line and a nonzero exit status.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* category() const noexcept { return "error"; }
};

class ParameterError : public Error {
public:
    using Error::Error;
    const char* category() const noexcept override { return "parameter error"; }
};

/// Non-finite data offered to a trajectory or grid constructor.
class ConstructionError : public Error {
public:
    using Error::Error;
    const char* category() const noexcept override { return "construction error"; }
};

class ConfigError : public Error {
public:
    using Error::Error;
    const char* category() const noexcept override { return "config error"; }
};

class IntegrationDiverged : public Error {
public:
    IntegrationDiverged(double time, const std::string& what)
        : Error(what), time_(time) {}
    double time() const noexcept { return time_; }
    const char* category() const noexcept override { return "integration diverged"; }

private:
    double time_;
};

class InsufficientRecoveryData : public Error {
public:
    using Error::Error;
    const char* category() const noexcept override { return "insufficient recovery data"; }
};

class NoDamping : public Error {
public:
    using Error::Error;
    const char* category() const noexcept override { return "no damping"; }
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line), detail_(what) {}
    std::size_t line() const noexcept { return line_; }
    /// Message without the line prefix.
    const std::string& detail() const noexcept { return detail_; }
    const char* category() const noexcept override { return "parse error"; }

private:
    std::size_t line_;
    std::string detail_;
};

class IoError : public Error {
public:
    using Error::Error;
    const char* category() const noexcept override { return "i/o error"; }
};

}  // namespace riskdyn
