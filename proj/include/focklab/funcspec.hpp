#pragma once

#include <string_view>

#include "focklab/funcmodel.hpp"

namespace focklab {

/// Parses "family:key=value;key=value". Families and keys:
///
///   const:1  or  const:c=1
///   coherent:a=0.5,0;alpha=1          (alpha defaults to default_alpha)
///   monomial:k=2                      (one entry per complex coordinate)
///   poly:1+z0+(0+0.5i)*z0^2           (coefficients may be a+bi or (a+bi))
///   expquad:c=0.1
///   sumcoherent:alpha=1;atoms=0.6@0.4,0|0.4@-0.5,0
///
/// Every family also accepts scale=<factor>. Throws ParseError with the
/// offending offset.
TestFunction parse_function_spec(std::string_view text, int m, double default_alpha = 1.0);

}  // namespace focklab
