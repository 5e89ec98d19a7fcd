#include "charbvp/analysis.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

namespace charbvp {

namespace {

void require_finite(const CMatrix& M) {
    for (Eigen::Index i = 0; i < M.size(); ++i) {
        const Complex v = M.data()[i];
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw NumericalError("matrix has non-finite entries");
    }
}

struct Decomposition {
    Eigen::JacobiSVD<CMatrix> svd;
    RankInfo info;
};

Decomposition decompose(const CMatrix& M, std::optional<double> tau, unsigned options) {
    require_finite(M);
    Decomposition d{Eigen::JacobiSVD<CMatrix>(M, options), {}};
    d.info.singularValues = d.svd.singularValues();
    d.info.tolerance = tau ? *tau : default_rank_tolerance(M, d.info.singularValues);
    if (d.info.tolerance < 0.0 || !std::isfinite(d.info.tolerance))
        throw ValidationError("rank tolerance must be finite and >= 0");
    for (Eigen::Index i = 0; i < d.info.singularValues.size(); ++i) {
        const double s = d.info.singularValues[i];
        if (s > d.info.tolerance) ++d.info.rank;
        if (s >= d.info.tolerance / 10.0 && s <= d.info.tolerance * 10.0) d.info.uncertain = true;
    }
    return d;
}

}  // namespace

double default_rank_tolerance(const CMatrix& M, const Eigen::VectorXd& singular_values) {
    const double sigma_max = singular_values.size() > 0 ? singular_values.maxCoeff() : 0.0;
    if (sigma_max == 0.0) return 1e-12;
    return static_cast<double>(std::max(M.rows(), M.cols())) * sigma_max * 1e-10;
}

RankInfo numerical_rank(const CMatrix& M, std::optional<double> tau) { return decompose(M, tau, 0).info; }

CharReport d_characteristics(const CMatrix& M, std::optional<double> tau) {
    const RankInfo info = numerical_rank(M, tau);
    const auto l = static_cast<int>(M.rows());
    const auto m = static_cast<int>(M.cols());
    CharReport r;
    r.M = M;
    r.singularValues = info.singularValues;
    r.rank = info.rank;
    r.dimKer = m - info.rank;
    r.dimCoker = l - info.rank;
    r.index = r.dimKer - r.dimCoker;
    r.invertible = l == m && info.rank == m;
    r.rankTolerance = info.tolerance;
    r.rankUncertain = info.uncertain;
    return r;
}

CMatrix kernel_basis_matrix(const CMatrix& M, std::optional<double> tau) {
    const Decomposition d = decompose(M, tau, Eigen::ComputeFullV);
    const Eigen::Index m = M.cols();
    return d.svd.matrixV().rightCols(m - d.info.rank);
}

Characteristic compute_characteristic(const Problem& p, const IntegratorConfig& cfg) {
    p.validate();
    Trajectory Y = fundamental_matrix(p.A, p.interval, cfg);
    const MatrixFunction Yd = with_derivatives(Y, p.A, std::nullopt);
    CMatrix M = cfg.perColumn ? apply_columnwise(p.B, Yd, p.interval) : p.B.apply(Yd, p.interval);
    return {std::move(Y), std::move(M)};
}

CMatrix characteristic_matrix(const Problem& p, const IntegratorConfig& cfg) {
    return compute_characteristic(p, cfg).M;
}

}  // namespace charbvp
