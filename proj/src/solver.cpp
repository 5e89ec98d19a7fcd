#include "charbvp/solver.hpp"

#include <Eigen/SVD>

namespace charbvp {

const char* to_string(SolutionKind k) noexcept {
    switch (k) {
        case SolutionKind::unique: return "unique";
        case SolutionKind::family: return "family";
        case SolutionKind::none: return "none";
    }
    return "unknown";
}

namespace {

struct Reduction {
    Characteristic characteristic;
    CharReport report;
    CVector reduced;  // r = c - B y_p
    CVector q;        // minimal-norm least-squares solution of M q = r
    double gap = 0.0;
    bool solvable = false;
};

Reduction reduce(const Problem& p, const SolverConfig& cfg) {
    Reduction red{compute_characteristic(p, cfg.integrator), {}, {}, {}, 0.0, false};
    const CMatrix& M = red.characteristic.M;
    red.report = d_characteristics(M, cfg.rankTol);

    const Trajectory yp = particular_solution(p.A, p.f, p.interval, cfg.integrator);
    const MatrixFunction ypd = with_derivatives(yp, p.A, as_matrix(p.f));
    red.reduced = p.c - p.B.apply(ypd, p.interval).col(0);

    Eigen::JacobiSVD<CMatrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::Index r = red.report.rank;
    const CMatrix U = svd.matrixU().leftCols(r);
    const CMatrix V = svd.matrixV().leftCols(r);
    const CVector coords = U.adjoint() * red.reduced;
    const Eigen::VectorXd sigma = svd.singularValues().head(r);
    red.q = V * (coords.array() / sigma.array().cast<Complex>()).matrix();
    red.gap = (red.reduced - U * coords).norm();
    red.solvable = red.gap <= cfg.solvTol * (1.0 + red.reduced.norm());
    return red;
}

std::vector<double> verification_grid(const Interval& iv, std::size_t points) {
    return SampleGrid(iv, std::max<std::size_t>(points, 2)).points();
}

Residuals measure(const Problem& p, const Trajectory& y, const std::optional<MatrixFunction>& forcing,
                  const CVector& target, const std::vector<double>& grid) {
    Residuals res;
    res.ode = ode_residual(y, p.A, forcing, grid);
    const MatrixFunction yd = with_derivatives(y, p.A, forcing);
    res.boundary = vector_norm(p.B.apply(yd, p.interval).col(0) - target);
    return res;
}

}  // namespace

Solvability check_solvability(const Problem& p, const SolverConfig& cfg) {
    const Reduction red = reduce(p, cfg);
    return {red.solvable, red.gap};
}

Solution solve(const Problem& p, const SolverConfig& cfg) {
    Reduction red = reduce(p, cfg);
    Solution sol;
    sol.report = red.report;
    sol.consistencyGap = red.gap;
    sol.q = red.q;
    const auto grid = verification_grid(p.interval, cfg.verificationPoints);
    const std::optional<MatrixFunction> forcing = as_matrix(p.f);

    if (red.solvable) {
        sol.kind = red.report.dimKer == 0 ? SolutionKind::unique : SolutionKind::family;
        sol.y = solve_cauchy(p.A, forcing, red.q, p.interval, cfg.integrator);
        sol.residuals = measure(p, *sol.y, forcing, p.c, grid);
    }

    const CMatrix kernel = kernel_basis_matrix(red.characteristic.M, cfg.rankTol);
    const CVector zero = CVector::Zero(p.dims.l);
    for (Eigen::Index j = 0; j < kernel.cols(); ++j) {
        Trajectory w = solve_cauchy(p.A, std::nullopt, kernel.col(j), p.interval, cfg.integrator);
        sol.kernelResiduals.push_back(measure(p, w, std::nullopt, zero, grid));
        sol.kernelBasis.push_back(std::move(w));
    }
    return sol;
}

CVector solution_derivative(const Problem& p, const Trajectory& y, double t, int order) {
    return derive_via_system(y, p.A, p.f, t, order);
}

}  // namespace charbvp
