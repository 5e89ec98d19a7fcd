#include "charbvp/boundary.hpp"

#include <cmath>

#include "charbvp/parallel.hpp"

namespace charbvp {

namespace {

bool is_integral(double alpha) { return std::floor(alpha) == alpha; }

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

}  // namespace

int caputo_required_order(double alpha) {
    if (!std::isfinite(alpha) || alpha < 0.0) throw ValidationError("Caputo order must be finite and >= 0");
    if (is_integral(alpha)) return static_cast<int>(alpha);
    return static_cast<int>(std::floor(alpha)) + 1;
}

CMatrix caputo_right(const MatrixFunction& y, double alpha, double t, double b, const QuadratureSpec& quad) {
    const int nu = caputo_required_order(alpha);
    if (t > b) throw ValidationError("Caputo point lies beyond the anchor b");
    if (is_integral(alpha)) {
        const CMatrix v = y(t, nu);
        return nu % 2 == 0 ? v : CMatrix(-v);
    }
    if (y.maxDerivOrder() < nu) throw UnsupportedOrderError(nu, y.maxDerivOrder());
    if (t == b) return CMatrix::Zero(y.rows(), y.cols());
    const double beta = nu - alpha;  // in (0, 1)
    const double span = b - t;
    const double inv_beta = 1.0 / beta;
    const CMatrix integral = integrate(
        [&](double u) -> CMatrix {
            const double s = std::min(b, t + span * std::pow(u, inv_beta));
            return y(s, nu);
        },
        0.0, 1.0, quad);
    const double scale = std::pow(span, beta) / std::tgamma(beta + 1.0);
    return (nu % 2 == 0 ? scale : -scale) * integral;
}

CVector caputo_right(const VectorFunction& y, double alpha, double t, double b, const QuadratureSpec& quad) {
    const MatrixFunction as_mat(y.rows(), 1, y.maxDerivOrder(),
                                [y](double s, int order) -> CMatrix { return y(s, order); });
    return caputo_right(as_mat, alpha, t, b, quad).col(0);
}

BoundaryOperator::BoundaryOperator(Eigen::Index l, Eigen::Index m, std::vector<BoundaryTerm> terms)
    : l_(l), m_(m), terms_(std::move(terms)) {
    if (l < 1 || m < 1) throw ValidationError("boundary operator dimensions must be positive");
    if (terms_.empty()) throw ValidationError("boundary operator needs at least one term");
    for (const auto& term : terms_) {
        std::visit(overloaded{
                       [&](const PointTerm& p) {
                           if (p.coeff.rows() != l || p.coeff.cols() != m)
                               throw ValidationError("point term coefficient must be l x m");
                           weights_.push_back(MatrixFunction::zero(1, 1));
                       },
                       [&](const IntegralTerm& w) {
                           if (w.weight.rows() != l || w.weight.cols() != m)
                               throw ValidationError("integral term weight must be l x m");
                           weights_.push_back(w.weight.to_function(0));
                       },
                       [&](const CaputoTerm& c) {
                           if (c.coeff.rows() != l || c.coeff.cols() != m)
                               throw ValidationError("caputo term coefficient must be l x m");
                           caputo_required_order(c.order);
                           weights_.push_back(MatrixFunction::zero(1, 1));
                       },
                   },
                   term);
    }
}

int BoundaryOperator::inputSmoothness() const {
    int need = 0;
    for (const auto& term : terms_) {
        std::visit(overloaded{
                       [&](const PointTerm& p) { need = std::max(need, p.order); },
                       [&](const IntegralTerm& w) { need = std::max(need, w.order); },
                       [&](const CaputoTerm& c) { need = std::max(need, caputo_required_order(c.order)); },
                   },
                   term);
    }
    return need;
}

void BoundaryOperator::validate(const Interval& iv, int n) const {
    for (std::size_t k = 0; k < terms_.size(); ++k) {
        const std::string where = "boundary term " + std::to_string(k) + ": ";
        std::visit(overloaded{
                       [&](const PointTerm& p) {
                           if (!iv.contains(p.point)) throw ValidationError(where + "point outside [a, b]");
                           if (p.order < 0 || p.order > n) throw ValidationError(where + "order must lie in 0..n");
                       },
                       [&](const IntegralTerm& w) {
                           if (w.order < 0 || w.order > n) throw ValidationError(where + "order must lie in 0..n");
                       },
                       [&](const CaputoTerm& c) {
                           if (!iv.contains(c.point)) throw ValidationError(where + "point outside [a, b]");
                           if (!std::isfinite(c.order) || c.order < 0.0)
                               throw ValidationError(where + "Caputo order must be finite and >= 0");
                           if (std::floor(c.order) > n - 1)
                               throw ValidationError(where + "Caputo order requires floor(alpha) <= n - 1");
                       },
                   },
                   terms_[k]);
    }
}

CMatrix BoundaryOperator::apply(const MatrixFunction& y, const Interval& iv) const {
    if (y.rows() != m_) throw ValidationError("boundary operator input dimension mismatch");
    CMatrix out = CMatrix::Zero(l_, y.cols());
    for (std::size_t k = 0; k < terms_.size(); ++k) {
        std::visit(overloaded{
                       [&](const PointTerm& p) { out += p.coeff * y(p.point, p.order); },
                       [&](const IntegralTerm& w) {
                           const MatrixFunction& weight = weights_[k];
                           out += integrate([&](double t) -> CMatrix { return weight(t, 0) * y(t, w.order); },
                                            iv.a(), iv.b(), w.quadrature);
                       },
                       [&](const CaputoTerm& c) {
                           out += c.coeff * caputo_right(y, c.order, c.point, iv.b(), c.quadrature);
                       },
                   },
                   terms_[k]);
    }
    return out;
}

CVector BoundaryOperator::apply(const VectorFunction& y, const Interval& iv) const {
    const MatrixFunction as_mat(y.rows(), 1, y.maxDerivOrder(),
                                [y](double s, int order) -> CMatrix { return y(s, order); });
    return apply(as_mat, iv).col(0);
}

namespace serial {

CMatrix apply_columnwise(const BoundaryOperator& B, const MatrixFunction& Y, const Interval& iv) {
    CMatrix out(B.outputDim(), Y.cols());
    for (Eigen::Index j = 0; j < Y.cols(); ++j) out.col(j) = B.apply(column_of(Y, j), iv);
    return out;
}

}  // namespace serial

CMatrix apply_columnwise(const BoundaryOperator& B, const MatrixFunction& Y, const Interval& iv) {
    CMatrix out(B.outputDim(), Y.cols());
    parallel_for(Y.cols(), [&](std::ptrdiff_t j) { out.col(j) = B.apply(column_of(Y, j), iv); });
    return out;
}

}  // namespace charbvp
