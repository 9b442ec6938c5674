#pragma once

#include <stdexcept>
#include <string>

namespace suitegauge {

// Base for every error raised by the library. The CLI maps these to exit
// status 1 (data errors); usage errors never reach this hierarchy.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed CSV input; the message carries the file and line number.
class ParseError : public Error {
public:
    ParseError(const std::string& file, std::size_t line, const std::string& what)
        : Error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class SchemaError : public Error {
public:
    using Error::Error;
};

class IntegrityError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class InsufficientDataError : public Error {
public:
    using Error::Error;
};

class SuiteTooSmallError : public Error {
public:
    SuiteTooSmallError(const std::string& suite_id, std::size_t remaining)
        : Error("suite '" + suite_id + "' has " + std::to_string(remaining) +
                " complete instance(s) after dropping incomplete rows; at least 2 required"),
          suite_id_(suite_id) {}

    const std::string& suite_id() const noexcept { return suite_id_; }

private:
    std::string suite_id_;
};

class CoverageError : public Error {
public:
    CoverageError(const std::string& suite_id, const std::string& algorithm_id,
                  const std::string& instance_id = {})
        : Error("algorithm '" + algorithm_id + "' has no performance records for " +
                (instance_id.empty() ? std::string() : "instance '" + instance_id + "' of ") +
                "suite '" + suite_id + "'"),
          suite_id_(suite_id) {}

    const std::string& suite_id() const noexcept { return suite_id_; }

private:
    std::string suite_id_;
};

class LookupError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace suitegauge
