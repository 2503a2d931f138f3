#pragma once

#include <stdexcept>
#include <string>

namespace qentropy {

/// Broad failure category; the CLI maps each one to a process exit code.
enum class ErrorKind {
    config,      // bad user configuration or usage
    io,          // file system or decode failure
    data,        // data / validation failure
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(ErrorKind::data, what) {}
};

class EmptyHistogramError : public Error {
public:
    EmptyHistogramError() : Error(ErrorKind::data, "histogram is empty (total = 0)") {}
};

class DecodeError : public Error {
public:
    DecodeError(std::size_t offset, const std::string& reason)
        : Error(ErrorKind::io, "decode error at byte " + std::to_string(offset) + ": " + reason),
          offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

class PartitionError : public Error {
public:
    explicit PartitionError(const std::string& what) : Error(ErrorKind::data, what) {}
};

class RenderError : public Error {
public:
    explicit RenderError(const std::string& what) : Error(ErrorKind::data, what) {}
};

/// Training, prediction, selection or cross-validation precondition failure.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(ErrorKind::data, what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

class ModelFormatError : public Error {
public:
    ModelFormatError(std::size_t line, const std::string& reason)
        : Error(ErrorKind::io, "model file line " + std::to_string(line) + ": " + reason), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Feature layout of a model does not match what extraction produced.
class CompatibilityError : public Error {
public:
    explicit CompatibilityError(const std::string& what) : Error(ErrorKind::data, what) {}
};

}  // namespace qentropy
