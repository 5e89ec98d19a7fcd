#include "charbvp/sequences.hpp"

#include <cmath>

#include "charbvp/parallel.hpp"

namespace charbvp {

double epsilon_at(EpsilonLaw law, int k) {
    if (k < 1) throw ValidationError("sequence index starts at 1");
    const auto kd = static_cast<double>(k);
    switch (law) {
        case EpsilonLaw::inverse: return 1.0 / kd;
        case EpsilonLaw::inverse_square: return 1.0 / (kd * kd);
        case EpsilonLaw::geometric: return std::ldexp(1.0, -k);
    }
    return 0.0;
}

EpsilonLaw parse_epsilon_law(const std::string& text) {
    if (text == "1/k") return EpsilonLaw::inverse;
    if (text == "1/k^2") return EpsilonLaw::inverse_square;
    if (text == "2^-k") return EpsilonLaw::geometric;
    throw ValidationError("unknown epsilon law '" + text + "' (expected 1/k, 1/k^2 or 2^-k)");
}

const char* to_string(EpsilonLaw law) noexcept {
    switch (law) {
        case EpsilonLaw::inverse: return "1/k";
        case EpsilonLaw::inverse_square: return "1/k^2";
        case EpsilonLaw::geometric: return "2^-k";
    }
    return "?";
}

namespace {

expr::MatrixExpr shifted(const expr::MatrixExpr& base, const expr::MatrixExpr& delta, double eps) {
    if (base.rows() != delta.rows() || base.cols() != delta.cols())
        throw ValidationError("weight perturbation dimension mismatch");
    std::vector<expr::Expr> entries;
    for (Eigen::Index j = 0; j < base.cols(); ++j)
        for (Eigen::Index i = 0; i < base.rows(); ++i)
            entries.push_back(expr::simplify(expr::make_binary(
                expr::Kind::add, base.at(i, j),
                expr::make_binary(expr::Kind::mul, expr::constant(eps), delta.at(i, j)))));
    return expr::MatrixExpr(base.rows(), base.cols(), std::move(entries));
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

}  // namespace

void ProblemSequence::validate() const {
    limit.validate();
    if (K < 2) throw ValidationError("sequence needs K >= 2");
    const auto& dA = perturbation.deltaA;
    if (dA) {
        if (dA->rows() != limit.dims.m || dA->cols() != limit.dims.m)
            throw ValidationError("A perturbation must be m x m");
        if (dA->maxDerivOrder() < limit.dims.n - 1)
            throw ValidationError("A perturbation must provide derivatives up to order n - 1");
    }
    const auto& dt = perturbation.deltaTerms;
    if (!dt.empty() && dt.size() != limit.B.terms().size())
        throw ValidationError("boundary perturbation needs one entry per boundary term");
    for (std::size_t i = 0; i < dt.size(); ++i) {
        const bool is_integral = std::holds_alternative<IntegralTerm>(limit.B.terms()[i]);
        if (is_integral && dt[i].coeff) throw ValidationError("integral terms are perturbed through 'weight'");
        if (!is_integral && dt[i].weight) throw ValidationError("only integral terms take a weight perturbation");
    }
}

Problem ProblemSequence::at(int k) const {
    const double eps = epsilon(k);
    Problem p = limit;
    if (perturbation.deltaA) p.A = limit.A + Complex(eps) * (*perturbation.deltaA);
    if (!perturbation.deltaTerms.empty()) {
        std::vector<BoundaryTerm> terms = limit.B.terms();
        for (std::size_t i = 0; i < terms.size(); ++i) {
            const TermPerturbation& d = perturbation.deltaTerms[i];
            std::visit(overloaded{
                           [&](PointTerm& t) {
                               if (d.coeff) t.coeff += eps * (*d.coeff);
                           },
                           [&](CaputoTerm& t) {
                               if (d.coeff) t.coeff += eps * (*d.coeff);
                           },
                           [&](IntegralTerm& t) {
                               if (d.weight) t.weight = shifted(t.weight, *d.weight, eps);
                           },
                       },
                       terms[i]);
        }
        p.B = BoundaryOperator(limit.B.outputDim(), limit.B.inputDim(), std::move(terms));
    }
    return p;
}

namespace {

SequenceRow evaluate_row(const ProblemSequence& seq, const CMatrix& M, int k, const SequenceConfig& cfg) {
    SequenceRow row;
    row.k = k;
    row.epsilon = seq.epsilon(k);
    const CMatrix Mk = characteristic_matrix(seq.at(k), cfg.integrator);
    row.distance = matrix_norm(Mk - M);
    row.report = d_characteristics(Mk, cfg.rankTol);
    return row;
}

ConvergenceReport assemble(CharReport limit, std::vector<SequenceRow> rows, const SequenceConfig& cfg) {
    ConvergenceReport rep;
    rep.limit = std::move(limit);
    rep.rows = std::move(rows);
    const auto K = static_cast<int>(rep.rows.size());
    const auto& d = rep.rows;

    bool all_tiny = true;
    for (const auto& r : d) all_tiny = all_tiny && r.distance <= cfg.noise;
    bool tail_monotone = true;
    for (int i = K / 2; i + 1 < K; ++i)
        tail_monotone = tail_monotone && d[static_cast<std::size_t>(i + 1)].distance <=
                                             d[static_cast<std::size_t>(i)].distance + cfg.noise;
    rep.matrixConverges = all_tiny || (d.back().distance < d.front().distance && tail_monotone);

    // Least k0 such that the inequality holds for every k >= k0.
    auto threshold = [&](auto holds) {
        int k0 = K + 1;
        for (int i = K - 1; i >= 0 && holds(d[static_cast<std::size_t>(i)].report); --i) k0 = i + 1;
        return k0;
    };
    const int ker_k = threshold([&](const CharReport& r) { return r.dimKer <= rep.limit.dimKer; });
    const int coker_k = threshold([&](const CharReport& r) { return r.dimCoker <= rep.limit.dimCoker; });
    rep.kerSemicontinuous = ker_k <= K;
    rep.cokerSemicontinuous = coker_k <= K;
    rep.thresholdK = std::max(ker_k, coker_k);

    rep.invertibilityStable = true;
    if (rep.limit.invertible)
        for (int i = rep.thresholdK - 1; i < K; ++i)
            rep.invertibilityStable = rep.invertibilityStable && d[static_cast<std::size_t>(i)].report.invertible;
    return rep;
}

}  // namespace

namespace serial {

ConvergenceReport run_sequence(const ProblemSequence& seq, const SequenceConfig& cfg) {
    seq.validate();
    const CMatrix M = characteristic_matrix(seq.limit, cfg.integrator);
    std::vector<SequenceRow> rows;
    for (int k = 1; k <= seq.K; ++k) rows.push_back(evaluate_row(seq, M, k, cfg));
    return assemble(d_characteristics(M, cfg.rankTol), std::move(rows), cfg);
}

}  // namespace serial

ConvergenceReport run_sequence(const ProblemSequence& seq, const SequenceConfig& cfg) {
    seq.validate();
    const CMatrix M = characteristic_matrix(seq.limit, cfg.integrator);
    std::vector<SequenceRow> rows(static_cast<std::size_t>(seq.K));
    parallel_for(seq.K, [&](std::ptrdiff_t i) {
        rows[static_cast<std::size_t>(i)] = evaluate_row(seq, M, static_cast<int>(i) + 1, cfg);
    });
    return assemble(d_characteristics(M, cfg.rankTol), std::move(rows), cfg);
}

std::vector<CertificateRow> strong_convergence_certificate(const ProblemSequence& seq, const SampleGrid& grid) {
    seq.validate();
    const int order = seq.limit.dims.n - 1;
    std::vector<CertificateRow> out;
    const auto& base_terms = seq.limit.B.terms();
    for (int k = 1; k <= seq.K; ++k) {
        const Problem pk = seq.at(k);
        CertificateRow row;
        row.k = k;
        row.coefficientDistance = matrix_cn_norm(pk.A - seq.limit.A, order, grid);
        const auto& terms = pk.B.terms();
        for (std::size_t i = 0; i < terms.size(); ++i) {
            double dist = 0.0;
            if (const auto* p = std::get_if<PointTerm>(&terms[i]))
                dist = matrix_norm(p->coeff - std::get<PointTerm>(base_terms[i]).coeff);
            else if (const auto* c = std::get_if<CaputoTerm>(&terms[i]))
                dist = matrix_norm(c->coeff - std::get<CaputoTerm>(base_terms[i]).coeff);
            else {
                const auto& w = std::get<IntegralTerm>(terms[i]).weight.to_function(0);
                const auto& w0 = std::get<IntegralTerm>(base_terms[i]).weight.to_function(0);
                dist = matrix_cn_norm(w - w0, 0, grid);
            }
            row.boundaryDistance = std::max(row.boundaryDistance, dist);
        }
        out.push_back(row);
    }
    return out;
}

}  // namespace charbvp
