#pragma once

#include <stdexcept>
#include <string>

namespace putforge {

/// Base class for all putforge failures.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid configuration or command-line usage. CLI exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A pipeline stage was invoked before its prerequisites exist. CLI exit code 3.
class MissingArtifactError : public Error {
public:
    using Error::Error;
};

/// The subject project (original, instrumented, or generated copy) failed to build.
/// CLI exit code 4.
class SubjectBuildError : public Error {
public:
    SubjectBuildError(const std::string& msg, std::string build_log)
        : Error(msg), log(std::move(build_log)) {}
    std::string log;
};

/// Source in the subject project could not be parsed. Carries file and byte offset.
class ParseError : public Error {
public:
    ParseError(const std::string& file, std::size_t offset, const std::string& what)
        : Error(file + ":" + std::to_string(offset) + ": " + what),
          file(file),
          offset(offset) {}
    std::string file;
    std::size_t offset;
};

/// A scalar value could not be encoded or decoded canonically.
class EncodingError : public Error {
public:
    using Error::Error;
};

}  // namespace putforge
