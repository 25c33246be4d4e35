#pragma once

#include <stdexcept>
#include <string>

namespace rfp {

enum class ErrorKind {
  Io,
  Parse,
  Spec,
  Usage,
  NoImports,
  EmptyInput,
};

/// Exception carried across module boundaries; the C API maps `kind` onto
/// its status codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace rfp
