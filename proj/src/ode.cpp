#include "charbvp/ode.hpp"

#include <algorithm>
#include <cmath>

#include "charbvp/parallel.hpp"

namespace charbvp {

namespace {

// Dormand-Prince 5(4) tableau with Hairer's continuous extension.
constexpr double c2 = 0.2, c3 = 0.3, c4 = 0.8, c5 = 8.0 / 9.0;
constexpr double a21 = 0.2, a31 = 3.0 / 40.0, a32 = 9.0 / 40.0, a41 = 44.0 / 45.0, a42 = -56.0 / 15.0,
                 a43 = 32.0 / 9.0, a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0, a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0, a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0,
                 a74 = 125.0 / 192.0, a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                 e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

constexpr double kSafety = 0.9;
constexpr double kFacMin = 0.2;
constexpr double kFacMax = 10.0;
constexpr double kBeta = 0.04;

class LinearRhs {
public:
    LinearRhs(const MatrixFunction& A, const std::optional<MatrixFunction>& forcing, Eigen::Index first_col,
              Eigen::Index cols)
        : A_(A), forcing_(forcing), first_col_(first_col), cols_(cols) {}

    CVector operator()(double t, const CVector& state) const {
        const Eigen::Index m = A_.rows();
        Eigen::Map<const CMatrix> y(state.data(), m, cols_);
        CMatrix dy = -(A_(t, 0) * y);
        if (forcing_) dy += (*forcing_)(t, 0).middleCols(first_col_, cols_);
        for (Eigen::Index i = 0; i < dy.size(); ++i) {
            const Complex v = dy.data()[i];
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw DomainError("non-finite right-hand side", t);
        }
        return Eigen::Map<const CVector>(dy.data(), dy.size());
    }

private:
    const MatrixFunction& A_;
    const std::optional<MatrixFunction>& forcing_;
    Eigen::Index first_col_;
    Eigen::Index cols_;
};

double scaled_norm(const CVector& e, const CVector& y0, const CVector& y1, const IntegratorConfig& cfg) {
    if (e.size() == 0) return 0.0;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < e.size(); ++i) {
        const double sk = cfg.absTol + cfg.relTol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        const double r = std::abs(e[i]) / sk;
        acc += r * r;
    }
    return std::sqrt(acc / static_cast<double>(e.size()));
}

double initial_step(const LinearRhs& rhs, double t0, const CVector& y0, const CVector& f0, double span,
                    const IntegratorConfig& cfg) {
    const double d0 = scaled_norm(y0, y0, y0, cfg);
    const double d1n = scaled_norm(f0, y0, y0, cfg);
    double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
    h0 = std::min(h0, span);
    const CVector y1 = y0 + h0 * f0;
    const CVector f1 = rhs(t0 + h0, y1);
    const double d2 = scaled_norm(f1 - f0, y0, y0, cfg) / h0;
    const double dm = std::max(d1n, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
    return std::min({100.0 * h0, h1, span});
}

Trajectory::Block integrate_block(const MatrixFunction& A, const std::optional<MatrixFunction>& forcing,
                                  const CMatrix& initial, Eigen::Index first_col, Eigen::Index cols,
                                  const Interval& iv, const IntegratorConfig& cfg, double& achieved) {
    const LinearRhs rhs(A, forcing, first_col, cols);
    const CMatrix init = initial.middleCols(first_col, cols);
    CVector y = Eigen::Map<const CVector>(init.data(), init.size());
    double t = iv.a();
    const double t_end = iv.b();
    CVector k1 = rhs(t, y);
    const double h_max = cfg.maxStepFraction * iv.length();
    double h = std::min(h_max, initial_step(rhs, t, y, k1, t_end - t, cfg));
    double fac_old = 1e-4;
    bool rejected = false;
    long steps = 0;
    Trajectory::Block block{first_col, cols, {}};
    achieved = 0.0;

    while (t < t_end) {
        if (++steps > cfg.maxSteps) throw NumericalError("integrator exceeded maxSteps");
        bool last = false;
        if (t + 1.01 * h >= t_end) {
            h = t_end - t;
            last = true;
        }
        if (h <= std::abs(t) * 1e-15 + 1e-300) throw NumericalError("integrator step size underflow");

        const CVector k2 = rhs(t + c2 * h, y + h * (a21 * k1));
        const CVector k3 = rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
        const CVector k4 = rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        const CVector k5 = rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const CVector k6 = rhs(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const CVector y_new = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        const CVector k7 = rhs(t + h, y_new);

        const CVector err_vec = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double err = scaled_norm(err_vec, y, y_new, cfg);
        const double fac11 = std::pow(err, 0.2 - kBeta * 0.75);

        if (err > 1.0) {
            h /= std::min(1.0 / kFacMin, fac11 / kSafety);
            rejected = true;
            continue;
        }

        double fac = fac11 / std::pow(fac_old, kBeta);
        fac = std::max(1.0 / kFacMax, std::min(1.0 / kFacMin, fac / kSafety));
        double h_new = std::min(h_max, h / fac);
        fac_old = std::max(err, 1e-4);
        if (rejected) {
            h_new = std::min(h_new, h);
            rejected = false;
        }

        const CVector ydiff = y_new - y;
        const CVector bspl = h * k1 - ydiff;
        Trajectory::Step step{t, h, {}};
        step.coeffs[0] = y;
        step.coeffs[1] = ydiff;
        step.coeffs[2] = bspl;
        step.coeffs[3] = ydiff - h * k7 - bspl;
        step.coeffs[4] = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
        block.steps.push_back(std::move(step));
        achieved = std::max(achieved, err_vec.cwiseAbs().maxCoeff());

        y = y_new;
        k1 = k7;
        t = last ? t_end : t + h;
        h = h_new;
    }
    return block;
}

}  // namespace

void IntegratorConfig::validate() const {
    if (!(absTol > 0.0) || !(absTol <= relTol) || !(relTol < 1.0))
        throw ValidationError("integrator tolerances require 0 < absTol <= relTol < 1");
    if (maxSteps < 1) throw ValidationError("maxSteps must be >= 1");
    if (!(maxStepFraction > 0.0) || !(maxStepFraction <= 1.0))
        throw ValidationError("maxStepFraction must lie in (0, 1]");
}

// ------------------------------------------------------------- Trajectory

Trajectory::Trajectory(Interval iv, Eigen::Index rows, Eigen::Index cols, std::vector<Block> blocks,
                       double achieved_tolerance)
    : interval_(iv), rows_(rows), cols_(cols), blocks_(std::move(blocks)), achieved_tolerance_(achieved_tolerance) {
    for (const auto& b : blocks_)
        if (b.steps.empty()) throw NumericalError("trajectory block without steps");
}

template <bool Slope>
CMatrix Trajectory::sample(double t) const {
    if (!(t >= interval_.a() - 1e-12 * interval_.length()) || !(t <= interval_.b() + 1e-12 * interval_.length()))
        throw ValidationError("trajectory evaluated outside its interval");
    CMatrix out(rows_, cols_);
    for (const auto& block : blocks_) {
        const auto& steps = block.steps;
        auto it = std::upper_bound(steps.begin(), steps.end(), t,
                                   [](double v, const Step& s) { return v < s.t0; });
        const Step& s = it == steps.begin() ? steps.front() : *std::prev(it);
        const double theta = (t - s.t0) / s.h;
        const double theta1 = 1.0 - theta;
        const auto& r = s.coeffs;
        CVector v;
        if constexpr (Slope) {
            const CVector p = r[3] + theta1 * r[4];
            const CVector dp = -r[4];
            const CVector q = r[2] + theta * p;
            const CVector dq = p + theta * dp;
            const CVector rr = r[1] + theta1 * q;
            const CVector drr = -q + theta1 * dq;
            v = (rr + theta * drr) / s.h;
        } else {
            v = r[0] + theta * (r[1] + theta1 * (r[2] + theta * (r[3] + theta1 * r[4])));
        }
        out.middleCols(block.first_col, block.cols) = Eigen::Map<const CMatrix>(v.data(), rows_, block.cols);
    }
    return out;
}

CMatrix Trajectory::value(double t) const { return sample<false>(t); }

CMatrix Trajectory::interpolant_slope(double t) const { return sample<true>(t); }

std::size_t Trajectory::stepCount() const noexcept {
    std::size_t n = 0;
    for (const auto& b : blocks_) n += b.steps.size();
    return n;
}

std::vector<double> Trajectory::mesh() const {
    std::vector<double> pts;
    for (const auto& s : blocks_.front().steps) pts.push_back(s.t0);
    pts.push_back(interval_.b());
    return pts;
}

// ------------------------------------------------------------- integration

Trajectory solve_cauchy(const MatrixFunction& A, const std::optional<MatrixFunction>& forcing,
                        const CMatrix& initial, const Interval& iv, const IntegratorConfig& cfg) {
    cfg.validate();
    const Eigen::Index m = A.rows();
    if (A.cols() != m) throw ValidationError("coefficient matrix must be square");
    if (initial.rows() != m) throw ValidationError("initial value has wrong row count");
    if (forcing && (forcing->rows() != m || forcing->cols() != initial.cols()))
        throw ValidationError("forcing dimension mismatch");
    const Eigen::Index k = initial.cols();

    if (!cfg.perColumn || k == 1) {
        double achieved = 0.0;
        std::vector<Trajectory::Block> blocks;
        blocks.push_back(integrate_block(A, forcing, initial, 0, k, iv, cfg, achieved));
        return Trajectory(iv, m, k, std::move(blocks), achieved);
    }

    std::vector<Trajectory::Block> blocks(static_cast<std::size_t>(k));
    std::vector<double> achieved(static_cast<std::size_t>(k), 0.0);
    parallel_for(k, [&](std::ptrdiff_t j) {
        const auto idx = static_cast<std::size_t>(j);
        blocks[idx] = integrate_block(A, forcing, initial, j, 1, iv, cfg, achieved[idx]);
    });
    return Trajectory(iv, m, k, std::move(blocks), *std::max_element(achieved.begin(), achieved.end()));
}

Trajectory fundamental_matrix(const MatrixFunction& A, const Interval& iv, const IntegratorConfig& cfg) {
    return solve_cauchy(A, std::nullopt, CMatrix::Identity(A.rows(), A.rows()), iv, cfg);
}

MatrixFunction as_matrix(const VectorFunction& f) {
    return MatrixFunction(f.rows(), 1, f.maxDerivOrder(), [f](double t, int order) -> CMatrix { return f(t, order); });
}

Trajectory particular_solution(const MatrixFunction& A, const VectorFunction& f, const Interval& iv,
                               const IntegratorConfig& cfg) {
    if (f.rows() != A.rows()) throw ValidationError("right-hand side dimension mismatch");
    return solve_cauchy(A, as_matrix(f), CMatrix::Zero(A.rows(), 1), iv, cfg);
}

// ------------------------------------------------------------- derivatives

namespace {

std::vector<CMatrix> derivative_stack(const CMatrix& value, const MatrixFunction& A,
                                      const std::optional<MatrixFunction>& forcing, double t, int j) {
    if (j < 0) throw ValidationError("derivative order must be >= 0");
    if (j >= 1 && A.maxDerivOrder() < j - 1) throw UnsupportedOrderError(j, A.maxDerivOrder() + 1);
    if (j >= 1 && forcing && forcing->maxDerivOrder() < j - 1)
        throw UnsupportedOrderError(j, forcing->maxDerivOrder() + 1);
    std::vector<CMatrix> a_derivs;
    std::vector<CMatrix> y{value};
    for (int k = 1; k <= j; ++k) {
        a_derivs.push_back(A(t, k - 1));
        CMatrix next = forcing ? (*forcing)(t, k - 1) : CMatrix::Zero(value.rows(), value.cols());
        double binom = 1.0;  // binom(k-1, i)
        for (int i = 0; i <= k - 1; ++i) {
            next -= binom * (a_derivs[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(k - 1 - i)]);
            binom = binom * (k - 1 - i) / (i + 1);
        }
        y.push_back(std::move(next));
    }
    return y;
}

}  // namespace

CMatrix derive_via_system(const Trajectory& traj, const MatrixFunction& A,
                          const std::optional<MatrixFunction>& forcing, double t, int j) {
    return derivative_stack(traj.value(t), A, forcing, t, j).back();
}

CVector derive_via_system(const Trajectory& traj, const MatrixFunction& A, const VectorFunction& f, double t,
                          int j) {
    return derive_via_system(traj, A, std::optional<MatrixFunction>(as_matrix(f)), t, j).col(0);
}

MatrixFunction with_derivatives(const Trajectory& traj, const MatrixFunction& A,
                                const std::optional<MatrixFunction>& forcing) {
    int order = A.maxDerivOrder();
    if (forcing) order = std::min(order, forcing->maxDerivOrder());
    order = order >= kUnboundedOrder - 1 ? kUnboundedOrder : order + 1;
    return MatrixFunction(traj.rows(), traj.cols(), order, [traj, A, forcing](double t, int j) -> CMatrix {
        return derive_via_system(traj, A, forcing, t, j);
    });
}

// ------------------------------------------------------------- diagnostics

double ode_residual(const Trajectory& traj, const MatrixFunction& A, const std::optional<MatrixFunction>& forcing,
                    const std::vector<double>& grid) {
    double worst = 0.0;
    for (double t : grid) {
        CMatrix r = traj.interpolant_slope(t) + A(t, 0) * traj.value(t);
        if (forcing) r -= (*forcing)(t, 0);
        worst = std::max(worst, r.cwiseAbs().maxCoeff());
    }
    return worst;
}

double liouville_defect(const Trajectory& fundamental, const MatrixFunction& A, const std::vector<double>& grid,
                        const IntegratorConfig& cfg) {
    const MatrixFunction trace(1, 1, A.maxDerivOrder(), [A](double t, int order) -> CMatrix {
        CMatrix out(1, 1);
        out(0, 0) = A(t, order).trace();
        return out;
    });
    const Trajectory z = solve_cauchy(trace, std::nullopt, CMatrix::Identity(1, 1), fundamental.interval(), cfg);
    double worst = 0.0;
    for (double t : grid) {
        const Complex det = fundamental.value(t).determinant();
        const Complex ref = z.value(t)(0, 0);
        worst = std::max(worst, std::abs(det - ref) / std::abs(ref));
    }
    return worst;
}

}  // namespace charbvp
