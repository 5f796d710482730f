#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace moverec {

// Broad failure classes; the CLI maps each one to a distinct exit code.
enum class ErrorCategory { Config, Data, Internal };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(ErrorCategory::Data, what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorCategory::Config, what) {}
};

class InternalError : public Error {
public:
    explicit InternalError(const std::string& what) : Error(ErrorCategory::Internal, what) {}
};

struct SourcePos {
    std::size_t line = 0;
    std::size_t column = 0;
};

class SyntaxError : public DataError {
public:
    SyntaxError(const std::string& file, SourcePos pos, const std::string& message)
        : DataError(file + ":" + std::to_string(pos.line) + ":" + std::to_string(pos.column) +
                    ": " + message),
          pos_(pos) {}

    SourcePos pos() const noexcept { return pos_; }

private:
    SourcePos pos_;
};

class DuplicateSignature : public DataError {
public:
    using DataError::DataError;
};

class NotFound : public DataError {
public:
    using DataError::DataError;
};

class DimMismatch : public DataError {
public:
    using DataError::DataError;
};

class CorruptFile : public DataError {
public:
    using DataError::DataError;
};

class VersionMismatch : public DataError {
public:
    using DataError::DataError;
};

class MissingArtifact : public DataError {
public:
    explicit MissingArtifact(const std::string& path)
        : DataError("missing artifact: " + path), path_(path) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace moverec
