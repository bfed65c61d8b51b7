#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace egonet {

// Input or parameter problems the caller can act on. The CLI maps these to
// exit code 1.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

class ParseError : public ValidationError {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& msg)
      : ValidationError(path + ":" + std::to_string(line) + ": " + msg) {}
};

class UnknownMemberError : public ValidationError {
 public:
  explicit UnknownMemberError(std::uint64_t id)
      : ValidationError("unknown member id " + std::to_string(id)) {}
};

}  // namespace egonet
