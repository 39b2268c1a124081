#pragma once

#include <stdexcept>
#include <string>

namespace xflie::sim {

enum class Errc {
  NoSupportingPoints,
  OutOfBounds,
  InvalidWorld,
  InvalidCamera,
};

const char* to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace xflie::sim
