#pragma once

#include <stdexcept>
#include <string>

namespace mvsg {

// Malformed input data, bad arguments or unreadable files. The CLI maps this
// to exit status 1; everything else derived from std::exception maps to 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke an operation's documented precondition.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// The suspiciousness metric is undefined for this view: zero block mass or
// block density not above the background density.
class InfeasibleViewError : public std::domain_error {
 public:
  InfeasibleViewError(const std::string& what, std::size_t view)
      : std::domain_error(what), view_(view) {}
  std::size_t view() const { return view_; }

 private:
  std::size_t view_;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mvsg
