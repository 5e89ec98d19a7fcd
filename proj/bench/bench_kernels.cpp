// Times the OpenMP kernels against their serial references.
//
//   charbvp_bench [--jobs N] [--repeat R]

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include <CLI11.hpp>

#include "charbvp/expr.hpp"
#include "charbvp/parallel.hpp"
#include "charbvp/sequences.hpp"

using namespace charbvp;

namespace {

double best_of(int repeat, const std::function<void()>& body) {
    double best = 1e300;
    for (int r = 0; r < repeat; ++r) {
        const auto start = std::chrono::steady_clock::now();
        body();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
    return best;
}

void row(const char* name, double serial_s, double parallel_s, bool agree) {
    std::printf("%-22s serial %9.4f s   parallel %9.4f s   speedup %5.2fx   %s\n", name, serial_s, parallel_s,
                serial_s / parallel_s, agree ? "results agree" : "RESULTS DIFFER");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"charbvp kernel benchmark"};
    int jobs = 0, repeat = 3;
    app.add_option("--jobs", jobs, "worker threads (0 = runtime default)");
    app.add_option("--repeat", repeat, "repetitions, best time is reported")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);
    configure_workers_from_env();
    if (jobs > 0) set_worker_count(jobs);
    std::printf("workers: %d\n", worker_count());

    const Interval iv(0.0, 1.0);

    {
        const VectorFunction x =
            expr::MatrixExpr::parse({{"sin(7*t) * exp(-t)"}, {"cos(3*t) + 1i*t^3"}, {"exp(2*t) / (1 + t^2)"}})
                .to_vector_function(4);
        const SampleGrid grid(iv, 50001);
        double s = 0, p = 0;
        const double ts = best_of(repeat, [&] { s = serial::cn_norm(x, 3, grid); });
        const double tp = best_of(repeat, [&] { p = cn_norm(x, 3, grid); });
        row("cn_norm", ts, tp, s == p);
    }

    {
        const int m = 6;
        std::vector<std::vector<std::string>> weights(m, std::vector<std::string>(m, "exp(-t) * cos(t)"));
        const BoundaryOperator B(m, m,
                                 {PointTerm{CMatrix::Identity(m, m), 0.0, 0},
                                  IntegralTerm{expr::MatrixExpr::parse(weights), 0, {}},
                                  CaputoTerm{CMatrix::Identity(m, m), 0.2, 0.5, {}}});
        std::vector<std::vector<std::string>> entries(m, std::vector<std::string>(m));
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) entries[i][j] = "sin(" + std::to_string(i + j + 1) + "*t) + t^2";
        const MatrixFunction Y = expr::MatrixExpr::parse(entries).to_function(2);
        CMatrix s, p;
        const double ts = best_of(repeat, [&] { s = serial::apply_columnwise(B, Y, iv); });
        const double tp = best_of(repeat, [&] { p = apply_columnwise(B, Y, iv); });
        row("apply_columnwise", ts, tp, s == p);
    }

    {
        const int m = 4;
        std::vector<std::vector<std::string>> entries(m, std::vector<std::string>(m));
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) entries[i][j] = i == j ? "cos(" + std::to_string(i + 1) + "*t)" : "0.3*t";
        Problem limit{iv,
                      ProblemDims{m, m, 1},
                      expr::MatrixExpr::parse(entries).to_function(2),
                      VectorFunction::zero(m),
                      BoundaryOperator(m, m, {PointTerm{CMatrix::Identity(m, m), 0.0, 0},
                                              PointTerm{-CMatrix::Identity(m, m), 1.0, 0}}),
                      CVector::Zero(m)};
        Perturbation d;
        d.deltaA = MatrixFunction::constant(CMatrix::Identity(m, m));
        const ProblemSequence seq{limit, d, 256};
        ConvergenceReport s, p;
        const double ts = best_of(repeat, [&] { s = serial::run_sequence(seq); });
        const double tp = best_of(repeat, [&] { p = run_sequence(seq); });
        bool agree = s.rows.size() == p.rows.size();
        for (std::size_t i = 0; agree && i < s.rows.size(); ++i) agree = s.rows[i].distance == p.rows[i].distance;
        row("run_sequence (K=256)", ts, tp, agree);
    }
    return 0;
}
