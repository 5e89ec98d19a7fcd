#pragma once

#include <optional>
#include <string>
#include <vector>

#include "charbvp/analysis.hpp"

namespace charbvp {

enum class EpsilonLaw { inverse, inverse_square, geometric };

/// eps_k for the law: 1/k, 1/k^2 or 2^-k.
double epsilon_at(EpsilonLaw law, int k);
EpsilonLaw parse_epsilon_law(const std::string& text);
const char* to_string(EpsilonLaw law) noexcept;

/// Perturbation of a single boundary term: coefficient matrix for point and
/// Caputo terms, weight matrix for integral terms.
struct TermPerturbation {
    std::optional<CMatrix> coeff;
    std::optional<expr::MatrixExpr> weight;
};

/// A_k = A + eps_k dA, term_k = term + eps_k dterm.
struct Perturbation {
    std::optional<MatrixFunction> deltaA;
    std::vector<TermPerturbation> deltaTerms;  // empty or one per boundary term
    EpsilonLaw law = EpsilonLaw::inverse;
};

struct ProblemSequence {
    Problem limit;
    Perturbation perturbation;
    int K = 64;

    double epsilon(int k) const { return epsilon_at(perturbation.law, k); }
    /// Problem number k (1-based).
    Problem at(int k) const;
    void validate() const;
};

struct SequenceConfig {
    IntegratorConfig integrator{};
    std::optional<double> rankTol;
    /// Slack for the monotone-decrease check of |M_k - M|.
    double noise = 1e-9;
};

struct SequenceRow {
    int k = 0;
    double epsilon = 0.0;
    double distance = 0.0;  // |M_k - M|
    CharReport report;
};

struct ConvergenceReport {
    CharReport limit;
    std::vector<SequenceRow> rows;
    bool matrixConverges = false;
    bool kerSemicontinuous = false;
    bool cokerSemicontinuous = false;
    /// Least k after which both semicontinuity inequalities hold; K + 1 when
    /// they fail at k = K.
    int thresholdK = 1;
    /// Limit invertible implies every M_k with k >= thresholdK invertible.
    bool invertibilityStable = true;
};

/// Evaluates every problem of the sequence (in parallel over k) and
/// assembles the convergence verdicts from the data.
ConvergenceReport run_sequence(const ProblemSequence& seq, const SequenceConfig& cfg = {});

namespace serial {
ConvergenceReport run_sequence(const ProblemSequence& seq, const SequenceConfig& cfg = {});
}

struct CertificateRow {
    int k = 0;
    double coefficientDistance = 0.0;  // sampled |A_k - A|_(n-1)
    double boundaryDistance = 0.0;     // max over terms of the term distance
};

/// Sampled distances that certify the sufficient condition for strong
/// convergence of (L_k, B_k) to (L, B).
std::vector<CertificateRow> strong_convergence_certificate(const ProblemSequence& seq, const SampleGrid& grid);

}  // namespace charbvp
