// Error types shared by the stokesvem core.
#pragma once

#include <stdexcept>
#include <string>

namespace svem {

enum class ErrorKind {
  InvalidArgument,
  Parse,
  Validation,
  Geometry,
  Solver,
  Io,
  Internal,
};

/// Exception carrying an ErrorKind so the C API can map it onto a status code.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

} // namespace svem
