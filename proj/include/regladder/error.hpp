#pragma once

#include <stdexcept>
#include <string>

namespace regladder {

/// Thrown when an operation's precondition is violated. The message is
/// prefixed with the operation name so the CLI can surface it verbatim.
class PreconditionError : public std::invalid_argument {
 public:
  PreconditionError(const std::string& op, const std::string& what)
      : std::invalid_argument(op + ": " + what), op_(op) {}

  const std::string& op() const noexcept { return op_; }

 private:
  std::string op_;
};

inline void require(bool cond, const char* op, const std::string& what) {
  if (!cond) throw PreconditionError(op, what);
}

}  // namespace regladder
