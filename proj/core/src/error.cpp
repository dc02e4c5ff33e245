#include "tscalc/error.hpp"

namespace tsc {

std::string_view to_string(errc code) noexcept {
  switch (code) {
    case errc::empty_scale:              return "empty_scale";
    case errc::invalid_segment:          return "invalid_segment";
    case errc::point_not_in_scale:       return "point_not_in_scale";
    case errc::not_in_kappa_kappa:       return "not_in_kappa_kappa";
    case errc::reflection_inadmissible:  return "reflection_inadmissible";
    case errc::one_sided_inadmissible:   return "one_sided_inadmissible";
    case errc::no_convergence:           return "no_convergence";
    case errc::domain_error:             return "domain_error";
    case errc::non_finite:               return "non_finite";
    case errc::zero_point:               return "zero_point";
    case errc::zero_denominator:         return "zero_denominator";
    case errc::bad_job:                  return "bad_job";
  }
  return "unknown";
}

}  // namespace tsc
