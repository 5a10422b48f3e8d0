// Built-in analytic field library for the experiments: trigonometric smooth
// fields (with and without the tangential boundary condition on the unit
// cube), gradient fields with vanishing curl, and seeded random polynomial
// fields of a requested degree. Curl callbacks are explicit and are guarded
// against user error by a finite-difference consistency check.
#ifndef COMMUTEPROJ_FIELDS_HPP
#define COMMUTEPROJ_FIELDS_HPP

#include <cstdint>
#include <string>

#include "commuteproj/hdiv_proj.hpp"

namespace cpj {

struct NamedField {
  std::string id;
  AnalyticVecField field;
  // Declared elementwise regularity exponents for reporting; smooth fields
  // use a large sentinel.
  double reg_s = 1e9;
  double reg_t = 1e9;
};

/// Field ids: "trig", "trigN", "grad", "gradtrig", "poly:<d>", "zero".
NamedField make_field(const std::string& id, std::uint64_t seed);

/// Max relative mismatch between the curl callback and a central-difference
/// curl of the value callback at `n` seeded random points in [0,1]^3.
double curl_consistency_error(const AnalyticVecField& f, std::uint64_t seed,
                              int n = 20);

}  // namespace cpj

#endif
