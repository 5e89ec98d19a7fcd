#pragma once

#include "charbvp/boundary.hpp"
#include "charbvp/model.hpp"

namespace charbvp {

/// y' + A(t) y = f(t) on (a, b), B y = c.
struct Problem {
    Interval interval;
    ProblemDims dims;
    MatrixFunction A;
    VectorFunction f;
    BoundaryOperator B;
    CVector c;

    /// Throws ValidationError unless every dimension and smoothness
    /// requirement holds.
    void validate() const;
};

}  // namespace charbvp
