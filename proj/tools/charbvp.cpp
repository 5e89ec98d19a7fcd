// charbvp: analyze, solve and run convergence experiments on linear
// boundary-value problems y' + A(t) y = f(t), B y = c.
//
// Exit codes: 0 success, 2 validation error, 3 numerical failure,
// 4 problem not solvable, 5 sequence did not converge.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "charbvp/io.hpp"
#include "charbvp/parallel.hpp"

namespace {

using namespace charbvp;
using io::Json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitUnsolvable = 4;
constexpr int kExitDiverged = 5;

struct Builtin {
    const char* name;
    const char* text;
};

const Builtin kBuiltins[] = {
#include "builtin_examples.inc"
};

const Builtin* find_builtin(const std::string& name) {
    for (const auto& b : kBuiltins)
        if (name == b.name) return &b;
    return nullptr;
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    out << text;
}

io::ProblemFile load(const std::string& path) {
    if (path.rfind("builtin:", 0) == 0) {
        const Builtin* b = find_builtin(path.substr(8));
        if (!b) throw ValidationError("no built-in example named '" + path.substr(8) + "'");
        return io::parse_problem_text(b->text);
    }
    return io::load_problem_file(path);
}

Json analyze_report(const io::ProblemFile& pf) {
    const Characteristic ch = compute_characteristic(pf.problem, pf.solver.integrator);
    const CharReport rep = d_characteristics(ch.M, pf.solver.rankTol);
    Json out = Json::object();
    out["command"] = "analyze";
    if (pf.normalized.contains("name")) out["name"] = pf.normalized["name"];
    const Json body = io::report_json(rep, pf.problem.dims);
    for (const auto& [k, v] : body.items()) out[k] = v;
    out["fundamentalSteps"] = ch.Y.stepCount();
    if (pf.expectedM) {
        const double dev = matrix_norm(ch.M - *pf.expectedM);
        const double bound = 1e-7 * (1.0 + matrix_norm(*pf.expectedM));
        out["expected"] = {{"deviation", dev}, {"bound", bound}, {"matches", dev <= bound}};
    }
    return out;
}

struct Options {
    std::string file;
    std::string out;
    std::string csv;
    std::string perturb;
    std::size_t samples = 101;
    bool derivs = false;
    bool dump_normalized = false;
    int kmax = 0;
    int jobs = 0;
};

int run_analyze(const Options& o) {
    const io::ProblemFile pf = load(o.file);
    if (o.dump_normalized) {
        emit(io::dump(pf.normalized), o.out);
        return kExitOk;
    }
    emit(io::dump(analyze_report(pf)), o.out);
    return kExitOk;
}

int run_solve(const Options& o) {
    const io::ProblemFile pf = load(o.file);
    if (o.dump_normalized) {
        emit(io::dump(pf.normalized), o.out);
        return kExitOk;
    }
    const Solution sol = solve(pf.problem, pf.solver);
    Json out = Json::object();
    out["command"] = "solve";
    if (pf.normalized.contains("name")) out["name"] = pf.normalized["name"];
    const Json body = io::solution_json(sol, pf.problem.dims);
    for (const auto& [k, v] : body.items()) out[k] = v;
    emit(io::dump(out), o.out);
    if (!o.csv.empty() && sol.y) emit(io::solution_csv(pf.problem, *sol.y, o.samples, o.derivs), o.csv);
    if (sol.kind == SolutionKind::none) {
        std::cerr << "charbvp: problem is not solvable (consistency gap " << io::format_double(sol.consistencyGap)
                  << ")\n";
        return kExitUnsolvable;
    }
    return kExitOk;
}

Json perturb_document(const std::string& spec) {
    if (spec.empty()) return nullptr;
    std::string text = spec;
    if (!spec.empty() && spec.front() == '@') {
        std::ifstream in(spec.substr(1));
        if (!in) throw ValidationError("cannot read perturbation file '" + spec.substr(1) + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        text = buf.str();
    }
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ValidationError(std::string("--perturb: malformed JSON: ") + e.what());
    }
}

int run_converge(const Options& o) {
    io::ProblemFile pf = load(o.file);
    if (o.dump_normalized) {
        emit(io::dump(pf.normalized), o.out);
        return kExitOk;
    }
    Perturbation pert;
    int kmax = pf.kmax;
    const Json cli_spec = perturb_document(o.perturb);
    if (!cli_spec.is_null()) {
        Json norm;
        pert = io::parse_perturbation(cli_spec, pf.problem, &norm);
        if (norm.contains("kmax")) kmax = norm["kmax"].get<int>();
    } else if (pf.perturbation) {
        pert = *pf.perturbation;
    } else {
        pert.deltaA = MatrixFunction::constant(CMatrix::Identity(pf.problem.dims.m, pf.problem.dims.m));
    }
    if (o.kmax > 0) kmax = o.kmax;

    const ProblemSequence seq{pf.problem, pert, kmax};
    SequenceConfig cfg;
    cfg.integrator = pf.solver.integrator;
    cfg.rankTol = pf.solver.rankTol;
    const ConvergenceReport rep = run_sequence(seq, cfg);
    const auto cert = strong_convergence_certificate(seq, SampleGrid(pf.problem.interval));

    Json out = Json::object();
    out["command"] = "converge";
    if (pf.normalized.contains("name")) out["name"] = pf.normalized["name"];
    const Json body = io::convergence_json(rep, cert, pert.law);
    for (const auto& [k, v] : body.items()) out[k] = v;
    emit(io::dump(out), o.out);
    if (!o.csv.empty()) emit(io::convergence_csv(rep, cert), o.csv);
    return rep.matrixConverges ? kExitOk : kExitDiverged;
}

int run_examples_list() {
    for (const auto& b : kBuiltins) {
        const io::ProblemFile pf = io::parse_problem_text(b.text);
        const std::string desc = pf.normalized.contains("description")
                                     ? pf.normalized["description"].get<std::string>()
                                     : std::string();
        std::cout << b.name << "\t" << desc << "\n";
    }
    return kExitOk;
}

int run_examples_run(const std::string& name, const std::string& out) {
    const Builtin* b = find_builtin(name);
    if (!b) throw ValidationError("no built-in example named '" + name + "'");
    const io::ProblemFile pf = io::parse_problem_text(b->text);
    const Json rep = analyze_report(pf);
    emit(io::dump(rep), out);
    if (rep.contains("expected") && !rep["expected"]["matches"].get<bool>()) return kExitNumerical;
    return kExitOk;
}

int run_examples_show(const std::string& name, const std::string& out) {
    const Builtin* b = find_builtin(name);
    if (!b) throw ValidationError("no built-in example named '" + name + "'");
    emit(b->text, out);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Characteristic-matrix analysis of linear boundary-value problems"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--jobs", o.jobs, "Worker threads (overrides CHARBVP_JOBS)");

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("file", o.file, "Problem file (JSON) or builtin:<name>")->required();
        cmd->add_option("-o,--out", o.out, "Write the report here instead of stdout");
        cmd->add_flag("--dump-normalized", o.dump_normalized, "Print the normalized problem and exit");
    };

    auto* analyze = app.add_subcommand("analyze", "Characteristic matrix and d-characteristics");
    add_common(analyze);

    auto* solve_cmd = app.add_subcommand("solve", "Solve the boundary-value problem");
    add_common(solve_cmd);
    solve_cmd->add_option("--csv", o.csv, "Write the sampled solution as CSV");
    solve_cmd->add_option("--samples", o.samples, "Number of CSV samples")->check(CLI::Range(2, 10'000'000));
    solve_cmd->add_flag("--derivs", o.derivs, "Include derivatives up to order n in the CSV");

    auto* converge = app.add_subcommand("converge", "Characteristic matrices along a perturbation family");
    add_common(converge);
    converge->add_option("--kmax", o.kmax, "Number of sequence members K")->check(CLI::Range(2, 1'000'000));
    converge->add_option("--perturb", o.perturb, "Perturbation spec as inline JSON or @file");
    converge->add_option("--csv", o.csv, "Write per-k rows as CSV");

    auto* examples = app.add_subcommand("examples", "Built-in example problems");
    examples->require_subcommand(1);
    auto* ex_list = examples->add_subcommand("list", "List built-in examples");
    std::string example_name;
    auto* ex_run = examples->add_subcommand("run", "Analyze a built-in example against its expected M");
    ex_run->add_option("name", example_name)->required();
    ex_run->add_option("-o,--out", o.out, "Write the report here instead of stdout");
    auto* ex_show = examples->add_subcommand("show", "Print a built-in example problem file");
    ex_show->add_option("name", example_name)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    configure_workers_from_env();
    if (o.jobs > 0) set_worker_count(o.jobs);

    try {
        if (*analyze) return run_analyze(o);
        if (*solve_cmd) return run_solve(o);
        if (*converge) return run_converge(o);
        if (*ex_list) return run_examples_list();
        if (*ex_run) return run_examples_run(example_name, o.out);
        if (*ex_show) return run_examples_show(example_name, o.out);
    } catch (const ValidationError& e) {
        std::cerr << "charbvp: validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const SyntaxError& e) {
        std::cerr << "charbvp: validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const UnsupportedOrderError& e) {
        std::cerr << "charbvp: validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const Error& e) {
        std::cerr << "charbvp: numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}
