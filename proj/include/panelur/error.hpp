#pragma once

#include <stdexcept>
#include <string>

namespace panelur {

enum class ErrorKind {
  Dimension,  ///< shapes or index ranges do not fit
  Data,       ///< non-finite, degenerate or unbalanced data
  Domain,     ///< argument outside its mathematical domain
  Numerical,  ///< singular system or failed factorization
  Config,     ///< invalid experiment or simulation configuration
  Resource,   ///< problem too large for a dense code path
  Parse,      ///< malformed input file
};

/// Single exception type for the library; callers switch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) throw Error(kind, what);
}

}  // namespace panelur
