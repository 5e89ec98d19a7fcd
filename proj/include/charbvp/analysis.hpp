#pragma once

#include <optional>

#include "charbvp/ode.hpp"
#include "charbvp/problem.hpp"

namespace charbvp {

struct RankInfo {
    int rank = 0;
    Eigen::VectorXd singularValues;  // descending
    double tolerance = 0.0;
    /// Some singular value lies within a decade of the tolerance.
    bool uncertain = false;
};

/// d-characteristics of a characteristic matrix M (l x m).
struct CharReport {
    CMatrix M;
    Eigen::VectorXd singularValues;
    int rank = 0;
    int dimKer = 0;
    int dimCoker = 0;
    int index = 0;
    bool invertible = false;
    double rankTolerance = 0.0;
    bool rankUncertain = false;
};

/// Default tolerance: max(l, m) * sigma_max * 1e-10, or 1e-12 when M = 0.
double default_rank_tolerance(const CMatrix& M, const Eigen::VectorXd& singular_values);

RankInfo numerical_rank(const CMatrix& M, std::optional<double> tau = std::nullopt);

CharReport d_characteristics(const CMatrix& M, std::optional<double> tau = std::nullopt);

/// Orthonormal basis (m x dimKer) of {q : M q = 0}: right singular vectors
/// belonging to singular values <= tau.
CMatrix kernel_basis_matrix(const CMatrix& M, std::optional<double> tau = std::nullopt);

/// Fundamental matrix together with the characteristic matrix built from it.
struct Characteristic {
    Trajectory Y;
    CMatrix M;
};

/// M(L, B): column j is B applied to column j of the fundamental matrix.
/// Uses the parallel columnwise kernel when cfg.perColumn is set.
Characteristic compute_characteristic(const Problem& p, const IntegratorConfig& cfg);
CMatrix characteristic_matrix(const Problem& p, const IntegratorConfig& cfg);

}  // namespace charbvp
