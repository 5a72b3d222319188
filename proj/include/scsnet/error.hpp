#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace scsnet {

/// Base of every error raised by the library. The message is prefixed with
/// the module that raised it, e.g. "data-pipeline: truncated payload".
class Error : public std::runtime_error {
 public:
  Error(const std::string& module, const std::string& message)
      : std::runtime_error(module + ": " + message), module_(module) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

/// Incompatible shapes or an axis out of range.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition was violated by the caller.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Malformed binary file. Carries the byte offset where parsing failed.
class FormatError : public Error {
 public:
  FormatError(const std::string& module, const std::string& message, std::uint64_t offset)
      : Error(module, message + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

/// Data content that cannot be processed (non-finite values, bad labels).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Invalid model or experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Training diverged or produced non-finite values.
class TrainingError : public Error {
 public:
  using Error::Error;
};

/// File system failures. The message always names the path.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace scsnet
