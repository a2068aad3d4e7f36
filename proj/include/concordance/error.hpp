#pragma once

#include <stdexcept>
#include <string>

namespace concordance {

/// Broad failure classes. The CLI maps each class onto a process exit code.
enum class ErrorKind {
  parse,          // malformed input text
  empty_input,    // no records at all
  structural,     // arrangement/sizes mismatch, bad permutation
  configuration,  // invalid option values
  capacity,       // search space or memory bound exceeded
  degenerate,     // statistic undefined for these sizes
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::parse: return "parse error";
    case ErrorKind::empty_input: return "empty input";
    case ErrorKind::structural: return "structural error";
    case ErrorKind::configuration: return "configuration error";
    case ErrorKind::capacity: return "capacity error";
    case ErrorKind::degenerate: return "degenerate statistic";
  }
  return "error";
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace concordance
