#pragma once

#include <functional>

#include "charbvp/model.hpp"

namespace charbvp {

struct QuadratureSpec {
    double absTol = 1e-9;
    double relTol = 1e-12;
    int maxSubdivisions = 4000;
};

/// Globally adaptive 15-point Gauss-Kronrod quadrature of a matrix-valued
/// integrand over [lo, hi]. The error estimate is the max-entry difference
/// between the Kronrod and embedded Gauss rules.
CMatrix integrate(const std::function<CMatrix(double)>& f, double lo, double hi, const QuadratureSpec& spec);

}  // namespace charbvp
