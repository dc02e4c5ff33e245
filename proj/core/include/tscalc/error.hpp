#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tsc {

// Failure categories surfaced to callers and rendered verbatim in CSV
// error columns.
enum class errc {
  empty_scale,
  invalid_segment,
  point_not_in_scale,
  not_in_kappa_kappa,
  reflection_inadmissible,
  one_sided_inadmissible,
  no_convergence,
  domain_error,
  non_finite,
  zero_point,
  zero_denominator,
  bad_job,
};

std::string_view to_string(errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace tsc
