#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "charbvp/sequences.hpp"
#include "charbvp/solver.hpp"

namespace charbvp::io {

using Json = nlohmann::ordered_json;

/// A fully parsed problem document. See schema/problem.schema.json.
struct ProblemFile {
    Problem problem;
    SolverConfig solver;
    std::optional<Perturbation> perturbation;
    int kmax = 64;
    std::optional<CMatrix> expectedM;
    /// Canonical form: every default spelled out, expressions printed fully
    /// parenthesized, complex numbers as [re, im].
    Json normalized;
};

/// Parses a problem document. Failures raise ValidationError (or
/// SyntaxError for expressions) whose message starts with the JSON pointer
/// of the offending field.
ProblemFile parse_problem(const Json& doc);
ProblemFile parse_problem_text(const std::string& text);
ProblemFile load_problem_file(const std::string& path);

/// Perturbation section against an already parsed problem.
Perturbation parse_perturbation(const Json& spec, const Problem& p, Json* normalized = nullptr);

Json to_json(const CMatrix& m);
Json to_json(const CVector& v);
Json to_json(Complex z);

Json report_json(const CharReport& r, const ProblemDims& dims);
Json solution_json(const Solution& s, const ProblemDims& dims);
Json convergence_json(const ConvergenceReport& r, const std::vector<CertificateRow>& certificate,
                      EpsilonLaw law);

/// Sampled solution: t, Re y_i, Im y_i (and derivatives 1..n when asked).
std::string solution_csv(const Problem& p, const Trajectory& y, std::size_t samples, bool derivatives);
std::string convergence_csv(const ConvergenceReport& r, const std::vector<CertificateRow>& certificate);

/// Deterministic pretty printer: insertion-ordered keys, two-space indent,
/// floating-point numbers with 17 significant digits.
std::string dump(const Json& j);

std::string format_double(double v);

}  // namespace charbvp::io
