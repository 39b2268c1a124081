#pragma once

#include <stdexcept>
#include <string>

namespace xflie::hpp {

enum class Errc {
  Unreachable,
  NoInspectedNodes,
  NotResolvable,
  UnknownLabel,
  ParseError,
};

const char* to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what, std::string suggestion = {})
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code),
        suggestion_(std::move(suggestion)) {}

  Errc code() const noexcept { return code_; }
  /// Nearest known label for UnknownLabel errors.
  const std::string& suggestion() const noexcept { return suggestion_; }

 private:
  Errc code_;
  std::string suggestion_;
};

}  // namespace xflie::hpp
