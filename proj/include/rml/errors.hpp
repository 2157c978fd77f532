#pragma once

#include <stdexcept>
#include <string>

namespace rml {

// Base of every error raised by the library. The CLI maps subclasses onto
// its exit codes (2 = invalid input, 3 = degenerate experiment).
class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class invalid_params : public error {
public:
  explicit invalid_params(const std::string& what)
      : error("invalid parameters: " + what) {}
};

class invalid_spec : public error {
public:
  explicit invalid_spec(const std::string& what)
      : error("invalid process spec: " + what) {}
};

class degenerate_denominator : public error {
public:
  explicit degenerate_denominator(const std::string& what)
      : error("degenerate denominator: " + what) {}
};

class unsupported_combination : public error {
public:
  explicit unsupported_combination(const std::string& what)
      : error("unsupported combination: " + what) {}
};

class unsupported_kernel : public error {
public:
  explicit unsupported_kernel(const std::string& what)
      : error("unsupported kernel: " + what) {}
};

class quadrature_failure : public error {
public:
  explicit quadrature_failure(const std::string& what)
      : error("quadrature failure: " + what) {}
};

class state_space_too_large : public error {
public:
  explicit state_space_too_large(const std::string& what)
      : error("state space too large: " + what) {}
};

class all_excluded : public error {
public:
  explicit all_excluded(const std::string& what)
      : error("all grid points excluded: " + what) {}
};

class too_many_exclusions : public error {
public:
  explicit too_many_exclusions(const std::string& what)
      : error("too many exclusions: " + what) {}
};

class empty_sample : public error {
public:
  explicit empty_sample(const std::string& what)
      : error("empty sample: " + what) {}
};

class degenerate_fit : public error {
public:
  explicit degenerate_fit(const std::string& what)
      : error("degenerate fit: " + what) {}
};

class config_error : public error {
public:
  explicit config_error(const std::string& what) : error("config: " + what) {}
};

}  // namespace rml
