#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "charbvp/errors.hpp"

namespace charbvp {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Derivative order reported by functions that are smooth to every order.
inline constexpr int kUnboundedOrder = std::numeric_limits<int>::max() / 4;

/// Closed interval [a, b] with a < b.
class Interval {
public:
    Interval(double a, double b);

    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    double length() const noexcept { return b_ - a_; }
    bool contains(double t) const noexcept { return t >= a_ && t <= b_; }

    friend bool operator==(const Interval&, const Interval&) = default;

private:
    double a_;
    double b_;
};

enum class Determination { underdetermined, square, overdetermined };

/// System dimension m, number of scalar conditions l, smoothness class n.
struct ProblemDims {
    int m = 1;
    int l = 1;
    int n = 1;

    void validate() const;
    Determination classify() const noexcept {
        if (l > m) return Determination::overdetermined;
        if (l < m) return Determination::underdetermined;
        return Determination::square;
    }

    friend bool operator==(const ProblemDims&, const ProblemDims&) = default;
};

const char* to_string(Determination d) noexcept;

/// A matrix- or vector-valued function of t together with its derivatives
/// up to maxDerivOrder(). Immutable; the evaluator must be reentrant.
template <class Value>
class TimeFunction {
public:
    using Evaluator = std::function<Value(double t, int order)>;

    TimeFunction(Eigen::Index rows, Eigen::Index cols, int max_order, Evaluator eval)
        : rows_(rows), cols_(cols), max_order_(max_order), eval_(std::move(eval)) {}

    /// Value of the order-th derivative at t.
    Value operator()(double t, int order = 0) const {
        if (order < 0 || order > max_order_) throw UnsupportedOrderError(order, max_order_);
        return eval_(t, order);
    }

    Eigen::Index rows() const noexcept { return rows_; }
    Eigen::Index cols() const noexcept { return cols_; }
    int maxDerivOrder() const noexcept { return max_order_; }

    static TimeFunction constant(Value v) {
        const Eigen::Index r = v.rows(), c = v.cols();
        return TimeFunction(r, c, kUnboundedOrder, [v = std::move(v)](double, int order) -> Value {
            if (order == 0) return v;
            return Value::Zero(v.rows(), v.cols());
        });
    }

    static TimeFunction zero(Eigen::Index rows, Eigen::Index cols = 1) {
        return constant(Value::Zero(rows, cols));
    }

    friend TimeFunction operator+(const TimeFunction& x, const TimeFunction& y) {
        if (x.rows_ != y.rows_ || x.cols_ != y.cols_)
            throw ValidationError("function sum: dimension mismatch");
        return TimeFunction(x.rows_, x.cols_, std::min(x.max_order_, y.max_order_),
                            [x, y](double t, int order) -> Value { return x(t, order) + y(t, order); });
    }

    friend TimeFunction operator*(Complex s, const TimeFunction& x) {
        return TimeFunction(x.rows_, x.cols_, x.max_order_,
                            [s, x](double t, int order) -> Value { return s * x(t, order); });
    }

    friend TimeFunction operator-(const TimeFunction& x, const TimeFunction& y) {
        return x + Complex(-1.0) * y;
    }

private:
    Eigen::Index rows_;
    Eigen::Index cols_;
    int max_order_;
    Evaluator eval_;
};

using MatrixFunction = TimeFunction<CMatrix>;
using VectorFunction = TimeFunction<CVector>;

/// Column j of a matrix function as a vector function.
VectorFunction column_of(const MatrixFunction& z, Eigen::Index j);

/// Deterministic sampling of [a, b]: a uniform grid plus extra anchor points.
struct SampleGrid {
    Interval interval;
    std::size_t uniform_points = 1001;
    std::vector<double> anchors;

    explicit SampleGrid(Interval iv, std::size_t points = 1001, std::vector<double> extra = {})
        : interval(iv), uniform_points(points), anchors(std::move(extra)) {}

    /// Sorted, de-duplicated sample points (endpoints always included).
    std::vector<double> points() const;
};

/// Sampled C^(n) norm of a vector function: the sum over components of
/// sum_{j<=n} max_t |x_i^(j)(t)|. A lower bound of the true norm that
/// converges as the grid refines.
double cn_norm(const VectorFunction& x, int n, const SampleGrid& grid);

/// Sampled C^(n) norm of a matrix function: the maximum column norm.
double matrix_cn_norm(const MatrixFunction& z, int n, const SampleGrid& grid);

/// Numeric counterparts: l1 norm for vectors, maximum column l1 norm for
/// matrices.
double vector_norm(const CVector& v);
double matrix_norm(const CMatrix& m);

namespace serial {
double cn_norm(const VectorFunction& x, int n, const SampleGrid& grid);
double matrix_cn_norm(const MatrixFunction& z, int n, const SampleGrid& grid);
}  // namespace serial

}  // namespace charbvp
