#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "charbvp/model.hpp"

namespace charbvp {

struct IntegratorConfig {
    double relTol = 1e-10;
    double absTol = 1e-12;
    long maxSteps = 1'000'000;
    /// Upper bound on the step size as a fraction of the interval length.
    /// Keeps the continuous extension (and its slope) accurate between the
    /// accepted points.
    double maxStepFraction = 1.0 / 32.0;
    /// Integrate each column of a matrix Cauchy problem independently and in
    /// parallel instead of as one coupled system.
    bool perColumn = false;

    void validate() const;
};

/// Dense-output solution of y' + A(t) y = F(t) on an interval. The value is
/// an r x k matrix (k = 1 for vector problems). Internally one or more
/// column blocks, each with its own accepted-step mesh and per-step
/// Dormand-Prince continuous extension.
class Trajectory {
public:
    struct Step {
        double t0;
        double h;
        std::array<CVector, 5> coeffs;
    };

    struct Block {
        Eigen::Index first_col;
        Eigen::Index cols;
        std::vector<Step> steps;
    };

    Trajectory(Interval iv, Eigen::Index rows, Eigen::Index cols, std::vector<Block> blocks,
               double achieved_tolerance);

    const Interval& interval() const noexcept { return interval_; }
    Eigen::Index rows() const noexcept { return rows_; }
    Eigen::Index cols() const noexcept { return cols_; }

    /// Interpolated value at t in [a, b].
    CMatrix value(double t) const;
    /// First derivative of the continuous extension. Independent of the
    /// system recurrence; used to measure residuals.
    CMatrix interpolant_slope(double t) const;

    std::size_t stepCount() const noexcept;
    double achievedTolerance() const noexcept { return achieved_tolerance_; }
    /// Accepted-step mesh of the first block.
    std::vector<double> mesh() const;

private:
    template <bool Slope>
    CMatrix sample(double t) const;

    Interval interval_;
    Eigen::Index rows_;
    Eigen::Index cols_;
    std::vector<Block> blocks_;
    double achieved_tolerance_;
};

/// Solves the Cauchy problem Y' + A(t) Y = F(t), Y(a) = initial. When
/// forcing is empty F = 0. Columns of the initial value are separate
/// solutions sharing A (and, column for column, F).
Trajectory solve_cauchy(const MatrixFunction& A, const std::optional<MatrixFunction>& forcing,
                        const CMatrix& initial, const Interval& iv, const IntegratorConfig& cfg);

/// Fundamental matrix: Y' + A Y = O, Y(a) = I.
Trajectory fundamental_matrix(const MatrixFunction& A, const Interval& iv, const IntegratorConfig& cfg);

/// Particular solution with y_p(a) = 0.
Trajectory particular_solution(const MatrixFunction& A, const VectorFunction& f, const Interval& iv,
                               const IntegratorConfig& cfg);

/// j-th derivative of the trajectory at t from the differential recurrence
/// y^(j) = f^(j-1) - sum_i binom(j-1, i) A^(i) y^(j-1-i), seeded with the
/// interpolated value. j = 0 returns the value.
CMatrix derive_via_system(const Trajectory& traj, const MatrixFunction& A,
                          const std::optional<MatrixFunction>& forcing, double t, int j);
CVector derive_via_system(const Trajectory& traj, const MatrixFunction& A, const VectorFunction& f, double t,
                          int j);

/// The trajectory as a function whose derivatives come from the recurrence.
/// Supports orders up to min(A, F) + 1.
MatrixFunction with_derivatives(const Trajectory& traj, const MatrixFunction& A,
                                const std::optional<MatrixFunction>& forcing);

/// Forcing as a single-column matrix function.
MatrixFunction as_matrix(const VectorFunction& f);

/// Maximum over the grid of |Y'(t) + A(t) Y(t) - F(t)| (max entry), with Y'
/// taken from the continuous extension.
double ode_residual(const Trajectory& traj, const MatrixFunction& A, const std::optional<MatrixFunction>& forcing,
                    const std::vector<double>& grid);

/// det Y on the grid compared with exp(-integral of trace A); returns the
/// maximum relative defect. The exponential is obtained by integrating the
/// scalar equation z' + tr A(t) z = 0 with the same integrator.
double liouville_defect(const Trajectory& fundamental, const MatrixFunction& A, const std::vector<double>& grid,
                        const IntegratorConfig& cfg);

}  // namespace charbvp
