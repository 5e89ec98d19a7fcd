#include "charbvp/model.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "charbvp/parallel.hpp"

namespace charbvp {

Interval::Interval(double a, double b) : a_(a), b_(b) {
    if (!std::isfinite(a) || !std::isfinite(b) || !(a < b))
        throw ValidationError("interval requires finite a < b");
}

void ProblemDims::validate() const {
    if (m < 1) throw ValidationError("dims.m must be >= 1");
    if (l < 1) throw ValidationError("dims.l must be >= 1");
    if (n < 1) throw ValidationError("dims.n must be >= 1");
}

const char* to_string(Determination d) noexcept {
    switch (d) {
        case Determination::underdetermined: return "underdetermined";
        case Determination::square: return "square";
        case Determination::overdetermined: return "overdetermined";
    }
    return "unknown";
}

VectorFunction column_of(const MatrixFunction& z, Eigen::Index j) {
    if (j < 0 || j >= z.cols()) throw ValidationError("column index out of range");
    return VectorFunction(z.rows(), 1, z.maxDerivOrder(),
                          [z, j](double t, int order) -> CVector { return z(t, order).col(j); });
}

std::vector<double> SampleGrid::points() const {
    if (uniform_points < 2) throw ValidationError("sample grid needs at least 2 points");
    std::vector<double> pts;
    pts.reserve(uniform_points + anchors.size());
    const double a = interval.a(), b = interval.b();
    const auto last = static_cast<double>(uniform_points - 1);
    for (std::size_t i = 0; i < uniform_points; ++i) {
        pts.push_back(i + 1 == uniform_points ? b : a + (b - a) * (static_cast<double>(i) / last));
    }
    for (double t : anchors) {
        if (!interval.contains(t)) throw ValidationError("grid anchor outside interval");
        pts.push_back(t);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

namespace {

void check_order(int have, int n) {
    if (n < 0) throw ValidationError("norm order must be >= 0");
    if (have < n) throw UnsupportedOrderError(n, have);
}

// maxima(i, j) = max over samples of |x_i^(j)|
double sum_of_maxima(const Eigen::MatrixXd& maxima) { return maxima.sum(); }

void fold_sample(const VectorFunction& x, int n, double t, Eigen::MatrixXd& maxima) {
    for (int j = 0; j <= n; ++j) {
        const CVector v = x(t, j);
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            const double mag = std::abs(v[i]);
            if (!std::isfinite(mag)) throw DomainError("non-finite function value", t);
            maxima(i, j) = std::max(maxima(i, j), mag);
        }
    }
}

}  // namespace

namespace serial {

double cn_norm(const VectorFunction& x, int n, const SampleGrid& grid) {
    check_order(x.maxDerivOrder(), n);
    Eigen::MatrixXd maxima = Eigen::MatrixXd::Zero(x.rows(), n + 1);
    for (double t : grid.points()) fold_sample(x, n, t, maxima);
    return sum_of_maxima(maxima);
}

double matrix_cn_norm(const MatrixFunction& z, int n, const SampleGrid& grid) {
    check_order(z.maxDerivOrder(), n);
    double best = 0.0;
    for (Eigen::Index j = 0; j < z.cols(); ++j) best = std::max(best, serial::cn_norm(column_of(z, j), n, grid));
    return best;
}

}  // namespace serial

double cn_norm(const VectorFunction& x, int n, const SampleGrid& grid) {
    check_order(x.maxDerivOrder(), n);
    const std::vector<double> pts = grid.points();
    Eigen::MatrixXd maxima = Eigen::MatrixXd::Zero(x.rows(), n + 1);
    std::mutex merge;
    const auto chunks = static_cast<std::ptrdiff_t>(std::max(1, worker_count()));
    const auto total = static_cast<std::ptrdiff_t>(pts.size());
    parallel_for(chunks, [&](std::ptrdiff_t c) {
        Eigen::MatrixXd local = Eigen::MatrixXd::Zero(x.rows(), n + 1);
        for (std::ptrdiff_t k = c; k < total; k += chunks) fold_sample(x, n, pts[k], local);
        std::lock_guard lock(merge);
        maxima = maxima.cwiseMax(local);
    });
    return sum_of_maxima(maxima);
}

double matrix_cn_norm(const MatrixFunction& z, int n, const SampleGrid& grid) {
    check_order(z.maxDerivOrder(), n);
    double best = 0.0;
    for (Eigen::Index j = 0; j < z.cols(); ++j) best = std::max(best, charbvp::cn_norm(column_of(z, j), n, grid));
    return best;
}

double vector_norm(const CVector& v) { return v.cwiseAbs().sum(); }

double matrix_norm(const CMatrix& m) {
    if (m.size() == 0) return 0.0;
    return m.cwiseAbs().colwise().sum().maxCoeff();
}

}  // namespace charbvp
