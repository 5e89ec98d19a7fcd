#include "charbvp/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace charbvp::io {

namespace {

[[noreturn]] void fail(const std::string& ptr, const std::string& msg) { throw ValidationError(ptr + ": " + msg); }

std::string child(const std::string& ptr, const std::string& key) { return ptr + "/" + key; }
std::string child(const std::string& ptr, std::size_t idx) { return ptr + "/" + std::to_string(idx); }

const Json& require(const Json& obj, const std::string& key, const std::string& ptr) {
    if (!obj.is_object()) fail(ptr, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) fail(child(ptr, key), "missing required field");
    return *it;
}

void reject_unknown(const Json& obj, const std::set<std::string>& allowed, const std::string& ptr) {
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key)) fail(child(ptr, key), "unknown field");
}

double real_of(const Json& v, const std::string& ptr) {
    if (!v.is_number()) fail(ptr, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(ptr, "expected a finite number");
    return x;
}

int int_of(const Json& v, const std::string& ptr) {
    if (!v.is_number_integer()) fail(ptr, "expected an integer");
    return v.get<int>();
}

expr::Expr parse_expr_at(const std::string& src, const std::string& ptr) {
    try {
        return expr::parse(src);
    } catch (const SyntaxError& e) {
        fail(ptr, e.what());
    }
}

/// number | [re, im] | t-free expression string
Complex complex_of(const Json& v, const std::string& ptr) {
    if (v.is_number()) return {real_of(v, ptr), 0.0};
    if (v.is_array()) {
        if (v.size() != 2) fail(ptr, "complex numbers are written [re, im]");
        return {real_of(v[0], child(ptr, 0)), real_of(v[1], child(ptr, 1))};
    }
    if (v.is_string()) {
        const expr::Expr e = parse_expr_at(v.get<std::string>(), ptr);
        if (expr::depends_on_t(e)) fail(ptr, "constant expected, expression depends on t");
        try {
            return expr::evaluate(e, 0.0);
        } catch (const DomainError& err) {
            fail(ptr, err.what());
        }
    }
    fail(ptr, "expected a number, [re, im] or a constant expression");
}

expr::Expr expr_of(const Json& v, const std::string& ptr) {
    if (v.is_string()) return parse_expr_at(v.get<std::string>(), ptr);
    return expr::constant(complex_of(v, ptr));
}

CMatrix numeric_matrix(const Json& v, Eigen::Index rows, Eigen::Index cols, const std::string& ptr) {
    if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != rows)
        fail(ptr, "expected a matrix with " + std::to_string(rows) + " rows");
    CMatrix out(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const Json& row = v[static_cast<std::size_t>(i)];
        const std::string rptr = child(ptr, static_cast<std::size_t>(i));
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            fail(rptr, "expected a row with " + std::to_string(cols) + " entries");
        for (Eigen::Index j = 0; j < cols; ++j)
            out(i, j) = complex_of(row[static_cast<std::size_t>(j)], child(rptr, static_cast<std::size_t>(j)));
    }
    return out;
}

CVector numeric_vector(const Json& v, Eigen::Index size, const std::string& ptr) {
    if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != size)
        fail(ptr, "expected a vector with " + std::to_string(size) + " entries");
    CVector out(size);
    for (Eigen::Index i = 0; i < size; ++i)
        out[i] = complex_of(v[static_cast<std::size_t>(i)], child(ptr, static_cast<std::size_t>(i)));
    return out;
}

expr::MatrixExpr expr_matrix(const Json& v, Eigen::Index rows, Eigen::Index cols, const std::string& ptr) {
    if (v.is_object()) {
        reject_unknown(v, {"constant"}, ptr);
        const Json& c = require(v, "constant", ptr);
        return expr::MatrixExpr::from_constant(numeric_matrix(c, rows, cols, child(ptr, "constant")));
    }
    if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != rows)
        fail(ptr, "expected a matrix with " + std::to_string(rows) + " rows");
    std::vector<expr::Expr> entries(static_cast<std::size_t>(rows * cols));
    for (Eigen::Index i = 0; i < rows; ++i) {
        const Json& row = v[static_cast<std::size_t>(i)];
        const std::string rptr = child(ptr, static_cast<std::size_t>(i));
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            fail(rptr, "expected a row with " + std::to_string(cols) + " entries");
        for (Eigen::Index j = 0; j < cols; ++j)
            entries[static_cast<std::size_t>(j * rows + i)] =
                expr_of(row[static_cast<std::size_t>(j)], child(rptr, static_cast<std::size_t>(j)));
    }
    return expr::MatrixExpr(rows, cols, std::move(entries));
}

Json expr_matrix_json(const expr::MatrixExpr& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(expr::to_string(m.at(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json expr_vector_json(const expr::MatrixExpr& m) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(expr::to_string(m.at(i, 0)));
    return out;
}

double point_of(const Json& v, const Interval& iv, const std::string& ptr) {
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "a") return iv.a();
        if (s == "b") return iv.b();
        fail(ptr, "point must be a number, \"a\" or \"b\"");
    }
    return real_of(v, ptr);
}

QuadratureSpec quadrature_of(const Json& term, const std::string& ptr) {
    QuadratureSpec q;
    if (term.contains("tol")) q.absTol = real_of(term["tol"], child(ptr, "tol"));
    if (!(q.absTol > 0.0)) fail(child(ptr, "tol"), "quadrature tolerance must be positive");
    return q;
}

BoundaryTerm parse_term(const Json& term, const Interval& iv, const ProblemDims& d, const std::string& ptr,
                        Json& norm) {
    if (!term.is_object()) fail(ptr, "expected a term object");
    const Json& type = require(term, "type", ptr);
    if (!type.is_string()) fail(child(ptr, "type"), "expected a string");
    const auto kind = type.get<std::string>();
    norm = Json::object();
    norm["type"] = kind;
    if (kind == "point") {
        reject_unknown(term, {"type", "coeff", "point", "order"}, ptr);
        PointTerm p;
        p.coeff = numeric_matrix(require(term, "coeff", ptr), d.l, d.m, child(ptr, "coeff"));
        p.point = point_of(require(term, "point", ptr), iv, child(ptr, "point"));
        p.order = term.contains("order") ? int_of(term["order"], child(ptr, "order")) : 0;
        if (p.order < 0 || p.order > d.n) fail(child(ptr, "order"), "derivative order must lie in 0..n");
        norm["coeff"] = to_json(p.coeff);
        norm["point"] = p.point;
        norm["order"] = p.order;
        return p;
    }
    if (kind == "integral") {
        reject_unknown(term, {"type", "weight", "order", "tol"}, ptr);
        IntegralTerm w{expr_matrix(require(term, "weight", ptr), d.l, d.m, child(ptr, "weight")), 0,
                       quadrature_of(term, ptr)};
        w.order = term.contains("order") ? int_of(term["order"], child(ptr, "order")) : 0;
        if (w.order < 0 || w.order > d.n) fail(child(ptr, "order"), "derivative order must lie in 0..n");
        norm["weight"] = expr_matrix_json(w.weight);
        norm["order"] = w.order;
        norm["tol"] = w.quadrature.absTol;
        return w;
    }
    if (kind == "caputo") {
        reject_unknown(term, {"type", "coeff", "point", "order", "tol"}, ptr);
        CaputoTerm c;
        c.coeff = numeric_matrix(require(term, "coeff", ptr), d.l, d.m, child(ptr, "coeff"));
        c.point = point_of(require(term, "point", ptr), iv, child(ptr, "point"));
        c.order = real_of(require(term, "order", ptr), child(ptr, "order"));
        if (!(c.order >= 0.0)) fail(child(ptr, "order"), "Caputo order must be >= 0");
        if (std::floor(c.order) > d.n - 1) fail(child(ptr, "order"), "Caputo order requires floor(alpha) <= n - 1");
        c.quadrature = quadrature_of(term, ptr);
        norm["coeff"] = to_json(c.coeff);
        norm["point"] = c.point;
        norm["order"] = c.order;
        norm["tol"] = c.quadrature.absTol;
        return c;
    }
    fail(child(ptr, "type"), "unknown term type '" + kind + "' (expected point, integral or caputo)");
}

template <class F>
auto with_pointer(const std::string& ptr, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ValidationError& e) {
        const std::string what = e.what();
        if (!what.empty() && what.front() == '/') throw;
        fail(ptr, what);
    }
}

}  // namespace

Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const CVector& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v[i]));
    return out;
}

Json to_json(const CMatrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

Perturbation parse_perturbation(const Json& spec, const Problem& p, Json* normalized) {
    const std::string ptr = "/perturbation";
    if (!spec.is_object()) fail(ptr, "expected an object");
    reject_unknown(spec, {"law", "A", "boundary", "kmax"}, ptr);
    Perturbation out;
    Json norm = Json::object();
    if (spec.contains("law")) {
        if (!spec["law"].is_string()) fail(child(ptr, "law"), "expected a string");
        out.law = with_pointer(child(ptr, "law"), [&] { return parse_epsilon_law(spec["law"].get<std::string>()); });
    }
    norm["law"] = to_string(out.law);
    const int n = p.dims.n;
    if (spec.contains("A")) {
        const auto dA = expr_matrix(spec["A"], p.dims.m, p.dims.m, child(ptr, "A"));
        out.deltaA = dA.to_function(n - 1);
        norm["A"] = expr_matrix_json(dA);
    }
    if (spec.contains("boundary")) {
        const Json& b = spec["boundary"];
        const std::string bptr = child(ptr, "boundary");
        if (!b.is_array() || b.size() != p.B.terms().size())
            fail(bptr, "expected one entry (or null) per boundary term");
        Json nb = Json::array();
        for (std::size_t i = 0; i < b.size(); ++i) {
            const std::string tptr = child(bptr, i);
            TermPerturbation tp;
            Json nt = nullptr;
            if (!b[i].is_null()) {
                reject_unknown(b[i], {"coeff", "weight"}, tptr);
                nt = Json::object();
                if (b[i].contains("coeff")) {
                    tp.coeff = numeric_matrix(b[i]["coeff"], p.dims.l, p.dims.m, child(tptr, "coeff"));
                    nt["coeff"] = to_json(*tp.coeff);
                }
                if (b[i].contains("weight")) {
                    tp.weight = expr_matrix(b[i]["weight"], p.dims.l, p.dims.m, child(tptr, "weight"));
                    nt["weight"] = expr_matrix_json(*tp.weight);
                }
            }
            out.deltaTerms.push_back(std::move(tp));
            nb.push_back(std::move(nt));
        }
        norm["boundary"] = std::move(nb);
    }
    if (spec.contains("kmax")) norm["kmax"] = int_of(spec["kmax"], child(ptr, "kmax"));
    if (normalized) *normalized = std::move(norm);
    return out;
}

ProblemFile parse_problem(const Json& doc) {
    const std::string root;
    if (!doc.is_object()) fail("/", "expected a JSON object");
    reject_unknown(doc,
                   {"name", "description", "interval", "dims", "A", "f", "boundary", "c", "tolerances",
                    "perturbation", "expected"},
                   root);
    Json norm = Json::object();
    if (doc.contains("name")) norm["name"] = doc["name"];
    if (doc.contains("description")) norm["description"] = doc["description"];

    const Json& jiv = require(doc, "interval", root);
    reject_unknown(jiv, {"a", "b"}, "/interval");
    const double a = real_of(require(jiv, "a", "/interval"), "/interval/a");
    const double b = real_of(require(jiv, "b", "/interval"), "/interval/b");
    const Interval iv = with_pointer("/interval", [&] { return Interval(a, b); });
    norm["interval"] = {{"a", a}, {"b", b}};

    const Json& jd = require(doc, "dims", root);
    reject_unknown(jd, {"m", "l", "n"}, "/dims");
    ProblemDims dims;
    dims.m = int_of(require(jd, "m", "/dims"), "/dims/m");
    dims.l = int_of(require(jd, "l", "/dims"), "/dims/l");
    dims.n = int_of(require(jd, "n", "/dims"), "/dims/n");
    with_pointer("/dims", [&] { dims.validate(); });
    norm["dims"] = {{"m", dims.m}, {"l", dims.l}, {"n", dims.n}};

    const auto A = expr_matrix(require(doc, "A", root), dims.m, dims.m, "/A");
    norm["A"] = expr_matrix_json(A);

    expr::MatrixExpr f = expr::MatrixExpr::from_constant(CMatrix::Zero(dims.m, 1));
    if (doc.contains("f")) {
        const Json& jf = doc["f"];
        if (!jf.is_array() || static_cast<int>(jf.size()) != dims.m) fail("/f", "expected a vector with m entries");
        std::vector<expr::Expr> entries;
        for (std::size_t i = 0; i < jf.size(); ++i) entries.push_back(expr_of(jf[i], child("/f", i)));
        f = expr::MatrixExpr(dims.m, 1, std::move(entries));
    }
    norm["f"] = expr_vector_json(f);

    const Json& jb = require(doc, "boundary", root);
    if (!jb.is_array() || jb.empty()) fail("/boundary", "expected a non-empty list of terms");
    std::vector<BoundaryTerm> terms;
    Json nb = Json::array();
    for (std::size_t i = 0; i < jb.size(); ++i) {
        Json nt;
        terms.push_back(parse_term(jb[i], iv, dims, child("/boundary", i), nt));
        nb.push_back(std::move(nt));
    }
    norm["boundary"] = std::move(nb);

    const CVector c = numeric_vector(require(doc, "c", root), dims.l, "/c");
    norm["c"] = to_json(c);

    SolverConfig solver;
    if (doc.contains("tolerances")) {
        const Json& t = doc["tolerances"];
        const std::string tp = "/tolerances";
        if (!t.is_object()) fail(tp, "expected an object");
        reject_unknown(t, {"relTol", "absTol", "maxSteps", "maxStepFraction", "perColumn", "rankTol", "solvTol", "verificationPoints"}, tp);
        if (t.contains("relTol")) solver.integrator.relTol = real_of(t["relTol"], child(tp, "relTol"));
        if (t.contains("absTol")) solver.integrator.absTol = real_of(t["absTol"], child(tp, "absTol"));
        if (t.contains("maxSteps")) solver.integrator.maxSteps = int_of(t["maxSteps"], child(tp, "maxSteps"));
        if (t.contains("maxStepFraction"))
            solver.integrator.maxStepFraction = real_of(t["maxStepFraction"], child(tp, "maxStepFraction"));
        if (t.contains("perColumn")) {
            if (!t["perColumn"].is_boolean()) fail(child(tp, "perColumn"), "expected a boolean");
            solver.integrator.perColumn = t["perColumn"].get<bool>();
        }
        if (t.contains("rankTol") && !t["rankTol"].is_null()) solver.rankTol = real_of(t["rankTol"], child(tp, "rankTol"));
        if (t.contains("solvTol")) solver.solvTol = real_of(t["solvTol"], child(tp, "solvTol"));
        if (t.contains("verificationPoints")) {
            const int pts = int_of(t["verificationPoints"], child(tp, "verificationPoints"));
            if (pts < 2) fail(child(tp, "verificationPoints"), "must be >= 2");
            solver.verificationPoints = static_cast<std::size_t>(pts);
        }
        with_pointer(tp, [&] { solver.integrator.validate(); });
        if (solver.rankTol && *solver.rankTol < 0.0) fail(child(tp, "rankTol"), "must be >= 0");
        if (!(solver.solvTol > 0.0)) fail(child(tp, "solvTol"), "must be positive");
    }
    norm["tolerances"] = {{"relTol", solver.integrator.relTol},
                          {"absTol", solver.integrator.absTol},
                          {"maxSteps", solver.integrator.maxSteps},
                          {"maxStepFraction", solver.integrator.maxStepFraction},
                          {"perColumn", solver.integrator.perColumn},
                          {"rankTol", solver.rankTol ? Json(*solver.rankTol) : Json(nullptr)},
                          {"solvTol", solver.solvTol},
                          {"verificationPoints", solver.verificationPoints}};

    Problem problem{iv,
                    dims,
                    A.to_function(dims.n - 1),
                    f.to_vector_function(dims.n - 1),
                    with_pointer("/boundary", [&] { return BoundaryOperator(dims.l, dims.m, terms); }),
                    c};
    with_pointer("/boundary", [&] { problem.validate(); });

    ProblemFile out{std::move(problem), solver, std::nullopt, 64, std::nullopt, Json()};
    if (doc.contains("perturbation")) {
        Json np;
        out.perturbation = parse_perturbation(doc["perturbation"], out.problem, &np);
        if (np.contains("kmax")) out.kmax = np["kmax"].get<int>();
        norm["perturbation"] = std::move(np);
    }
    if (doc.contains("expected")) {
        const Json& e = doc["expected"];
        reject_unknown(e, {"M"}, "/expected");
        out.expectedM = numeric_matrix(require(e, "M", "/expected"), dims.l, dims.m, "/expected/M");
        norm["expected"] = {{"M", to_json(*out.expectedM)}};
    }
    out.normalized = std::move(norm);
    return out;
}

ProblemFile parse_problem_text(const std::string& text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ValidationError(std::string("/: malformed JSON: ") + e.what());
    }
    return parse_problem(doc);
}

ProblemFile load_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read problem file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_problem_text(buf.str());
}

// ------------------------------------------------------------------ reports

Json report_json(const CharReport& r, const ProblemDims& dims) {
    Json sv = Json::array();
    for (Eigen::Index i = 0; i < r.singularValues.size(); ++i) sv.push_back(r.singularValues[i]);
    Json out = Json::object();
    out["dims"] = {{"m", dims.m}, {"l", dims.l}, {"n", dims.n}};
    out["classification"] = to_string(dims.classify());
    out["M"] = to_json(r.M);
    out["singularValues"] = std::move(sv);
    out["rank"] = r.rank;
    out["dimKer"] = r.dimKer;
    out["dimCoker"] = r.dimCoker;
    out["index"] = r.index;
    out["invertible"] = r.invertible;
    out["rankTolerance"] = r.rankTolerance;
    out["rankUncertain"] = r.rankUncertain;
    return out;
}

Json solution_json(const Solution& s, const ProblemDims& dims) {
    Json out = Json::object();
    out["kind"] = to_string(s.kind);
    out["representative"] = s.kind == SolutionKind::family ? "minimal-norm" : (s.y ? "unique" : "none");
    out["consistencyGap"] = s.consistencyGap;
    out["initialValue"] = s.y ? to_json(s.q) : Json(nullptr);
    out["residuals"] = s.y ? Json{{"ode", s.residuals.ode}, {"boundary", s.residuals.boundary}} : Json(nullptr);
    Json basis = Json::array();
    for (std::size_t i = 0; i < s.kernelBasis.size(); ++i) {
        basis.push_back({{"initialValue", to_json(CVector(s.kernelBasis[i].value(s.kernelBasis[i].interval().a()).col(0)))},
                         {"residuals", {{"ode", s.kernelResiduals[i].ode}, {"boundary", s.kernelResiduals[i].boundary}}}});
    }
    out["kernelBasis"] = std::move(basis);
    out["characteristic"] = report_json(s.report, dims);
    return out;
}

Json convergence_json(const ConvergenceReport& r, const std::vector<CertificateRow>& certificate, EpsilonLaw law) {
    Json out = Json::object();
    out["law"] = to_string(law);
    out["K"] = static_cast<int>(r.rows.size());
    out["matrixConverges"] = r.matrixConverges;
    out["kerSemicontinuous"] = r.kerSemicontinuous;
    out["cokerSemicontinuous"] = r.cokerSemicontinuous;
    out["thresholdK"] = r.thresholdK;
    out["invertibilityStable"] = r.invertibilityStable;
    out["limit"] = {{"rank", r.limit.rank},
                    {"dimKer", r.limit.dimKer},
                    {"dimCoker", r.limit.dimCoker},
                    {"index", r.limit.index},
                    {"invertible", r.limit.invertible},
                    {"M", to_json(r.limit.M)}};
    Json rows = Json::array();
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        const auto& row = r.rows[i];
        Json jr = {{"k", row.k},
                   {"epsilon", row.epsilon},
                   {"distance", row.distance},
                   {"rank", row.report.rank},
                   {"dimKer", row.report.dimKer},
                   {"dimCoker", row.report.dimCoker},
                   {"index", row.report.index},
                   {"invertible", row.report.invertible}};
        if (i < certificate.size()) {
            jr["coefficientDistance"] = certificate[i].coefficientDistance;
            jr["boundaryDistance"] = certificate[i].boundaryDistance;
        }
        rows.push_back(std::move(jr));
    }
    out["rows"] = std::move(rows);
    return out;
}

std::string format_double(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string solution_csv(const Problem& p, const Trajectory& y, std::size_t samples, bool derivatives) {
    if (samples < 2) throw ValidationError("--samples must be >= 2");
    const int top = derivatives ? p.dims.n : 0;
    std::ostringstream out;
    out << "t";
    for (int j = 0; j <= top; ++j)
        for (int i = 1; i <= p.dims.m; ++i) {
            const std::string suffix = j == 0 ? "" : "_d" + std::to_string(j);
            out << ",re_y" << i << suffix << ",im_y" << i << suffix;
        }
    out << '\n';
    for (double t : SampleGrid(p.interval, samples).points()) {
        out << format_double(t);
        for (int j = 0; j <= top; ++j) {
            const CVector v = solution_derivative(p, y, t, j);
            for (Eigen::Index i = 0; i < v.size(); ++i)
                out << ',' << format_double(v[i].real()) << ',' << format_double(v[i].imag());
        }
        out << '\n';
    }
    return out.str();
}

std::string convergence_csv(const ConvergenceReport& r, const std::vector<CertificateRow>& certificate) {
    std::ostringstream out;
    out << "k,epsilon,distance,rank,dimKer,dimCoker,index,invertible,coefficientDistance,boundaryDistance\n";
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        const auto& row = r.rows[i];
        out << row.k << ',' << format_double(row.epsilon) << ',' << format_double(row.distance) << ','
            << row.report.rank << ',' << row.report.dimKer << ',' << row.report.dimCoker << ','
            << row.report.index << ',' << (row.report.invertible ? 1 : 0) << ',';
        if (i < certificate.size())
            out << format_double(certificate[i].coefficientDistance) << ','
                << format_double(certificate[i].boundaryDistance);
        else
            out << ',';
        out << '\n';
    }
    return out.str();
}

// ----------------------------------------------------------------- printing

namespace {

void write(const Json& j, std::ostringstream& out, int depth) {
    const std::string pad(static_cast<std::size_t>(2 * depth), ' ');
    const std::string inner(static_cast<std::size_t>(2 * (depth + 1)), ' ');
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out << "{}";
                return;
            }
            out << "{\n";
            bool first = true;
            for (const auto& [key, value] : j.items()) {
                if (!first) out << ",\n";
                first = false;
                out << inner << Json(key).dump() << ": ";
                write(value, out, depth + 1);
            }
            out << '\n' << pad << '}';
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out << "[]";
                return;
            }
            bool scalars = true;
            for (const auto& v : j) scalars = scalars && !v.is_structured();
            if (scalars) {
                out << '[';
                for (std::size_t i = 0; i < j.size(); ++i) {
                    if (i) out << ", ";
                    write(j[i], out, depth + 1);
                }
                out << ']';
                return;
            }
            out << "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out << ",\n";
                out << inner;
                write(j[i], out, depth + 1);
            }
            out << '\n' << pad << ']';
            return;
        }
        case Json::value_t::number_float: out << format_double(j.get<double>()); return;
        default: out << j.dump(); return;
    }
}

}  // namespace

std::string dump(const Json& j) {
    std::ostringstream out;
    write(j, out, 0);
    out << '\n';
    return out.str();
}

}  // namespace charbvp::io
