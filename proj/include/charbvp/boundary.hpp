#pragma once

#include <variant>
#include <vector>

#include "charbvp/expr.hpp"
#include "charbvp/model.hpp"
#include "charbvp/quadrature.hpp"

namespace charbvp {

/// coeff * y^(order)(point)
struct PointTerm {
    CMatrix coeff;
    double point = 0.0;
    int order = 0;
};

/// integral over [a, b] of W(t) y^(order)(t) dt, W an l x m expression matrix.
struct IntegralTerm {
    expr::MatrixExpr weight;
    int order = 0;
    QuadratureSpec quadrature{};
};

/// coeff * (right-sided Caputo derivative of order alpha of y)(point).
struct CaputoTerm {
    CMatrix coeff;
    double point = 0.0;
    double order = 0.0;
    QuadratureSpec quadrature{};
};

using BoundaryTerm = std::variant<PointTerm, IntegralTerm, CaputoTerm>;

/// Classical derivative order a Caputo term of order alpha reads: 0 for
/// alpha = 0, alpha itself when integral, floor(alpha) + 1 otherwise.
int caputo_required_order(double alpha);

/// Right-sided Caputo derivative of y at t, anchored at b. Applied entrywise
/// to matrix-valued y. For non-integer alpha with nu = floor(alpha) + 1:
///
///     (-1)^nu / Gamma(nu - alpha) * int_t^b (s - t)^(nu - alpha - 1) y^(nu)(s) ds
///
/// evaluated after the substitution s = t + (b - t) u^(1 / (nu - alpha)),
/// which removes the kernel singularity.
CMatrix caputo_right(const MatrixFunction& y, double alpha, double t, double b, const QuadratureSpec& quad = {});
CVector caputo_right(const VectorFunction& y, double alpha, double t, double b, const QuadratureSpec& quad = {});

/// Finite sum of boundary terms mapping m-vector functions to C^l. Terms
/// are evaluated in declaration order.
class BoundaryOperator {
public:
    BoundaryOperator(Eigen::Index l, Eigen::Index m, std::vector<BoundaryTerm> terms);

    Eigen::Index outputDim() const noexcept { return l_; }
    Eigen::Index inputDim() const noexcept { return m_; }
    const std::vector<BoundaryTerm>& terms() const noexcept { return terms_; }

    /// Highest classical derivative order any term reads.
    int inputSmoothness() const;

    /// Checks term ranges against the interval and smoothness class n.
    void validate(const Interval& iv, int n) const;

    /// B applied to every column of y (m x k) at once; returns l x k.
    CMatrix apply(const MatrixFunction& y, const Interval& iv) const;
    CVector apply(const VectorFunction& y, const Interval& iv) const;

private:
    Eigen::Index l_;
    Eigen::Index m_;
    std::vector<BoundaryTerm> terms_;
    std::vector<MatrixFunction> weights_;  // integral weights, one per term (empty function otherwise)
};

/// Column j of the result is B applied to column j of Y. Columns are
/// processed in parallel.
CMatrix apply_columnwise(const BoundaryOperator& B, const MatrixFunction& Y, const Interval& iv);

namespace serial {
CMatrix apply_columnwise(const BoundaryOperator& B, const MatrixFunction& Y, const Interval& iv);
}

}  // namespace charbvp
