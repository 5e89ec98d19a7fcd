#include "charbvp/problem.hpp"

namespace charbvp {

void Problem::validate() const {
    dims.validate();
    const Eigen::Index m = dims.m, l = dims.l;
    if (A.rows() != m || A.cols() != m) throw ValidationError("A must be m x m");
    if (A.maxDerivOrder() < dims.n - 1) throw ValidationError("A must provide derivatives up to order n - 1");
    if (f.rows() != m) throw ValidationError("f must have dimension m");
    if (f.maxDerivOrder() < dims.n - 1) throw ValidationError("f must provide derivatives up to order n - 1");
    if (B.outputDim() != l || B.inputDim() != m) throw ValidationError("boundary operator must map C^m to C^l");
    if (c.size() != l) throw ValidationError("c must have dimension l");
    B.validate(interval, dims.n);
    if (B.inputSmoothness() > dims.n) throw ValidationError("boundary operator reads derivatives above order n");
}

}  // namespace charbvp
