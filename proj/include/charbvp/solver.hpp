#pragma once

#include <optional>
#include <vector>

#include "charbvp/analysis.hpp"

namespace charbvp {

struct SolverConfig {
    IntegratorConfig integrator{};
    std::optional<double> rankTol;
    /// Relative bound on the consistency gap: solvable iff
    /// gap <= solvTol * (1 + |r|).
    double solvTol = 1e-7;
    std::size_t verificationPoints = 201;
};

enum class SolutionKind { unique, family, none };

const char* to_string(SolutionKind k) noexcept;

struct Residuals {
    double ode = 0.0;       // max |y' + A y - f| on the verification grid
    double boundary = 0.0;  // |B y - c|
};

struct Solution {
    SolutionKind kind = SolutionKind::none;
    /// Representative with y(a) = q; the minimal-norm q when dimKer > 0.
    std::optional<Trajectory> y;
    Residuals residuals;
    /// Homogeneous solutions w_i with w_i(a) = kernel basis column i.
    std::vector<Trajectory> kernelBasis;
    std::vector<Residuals> kernelResiduals;
    double consistencyGap = 0.0;
    CVector q;
    CharReport report;
};

struct Solvability {
    bool solvable = false;
    double consistencyGap = 0.0;
};

/// Writes y = Y q + y_p, reducing B y = c to M q = c - B y_p.
Solution solve(const Problem& p, const SolverConfig& cfg = {});

Solvability check_solvability(const Problem& p, const SolverConfig& cfg = {});

/// y^(order)(t) of a solution trajectory of p, via the system recurrence.
CVector solution_derivative(const Problem& p, const Trajectory& y, double t, int order);

}  // namespace charbvp
