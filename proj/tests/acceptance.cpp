// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only when
// every criterion passes. All instances are drawn from a fixed seed.

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "charbvp/expr.hpp"
#include "charbvp/sequences.hpp"
#include "charbvp/solver.hpp"
#include "support.hpp"

using namespace charbvp;
using testsupport::caputo;
using testsupport::make_problem;
using testsupport::point;
using testsupport::random_complex;
using testsupport::uniform;
using testsupport::uniform_int;

namespace fs = std::filesystem;

namespace {

const IntegratorConfig kCfg{};
const Interval kUnit(0.0, 1.0);

// Largest relative Liouville defect over every fundamental matrix computed
// by criteria 1-7.
double g_liouville = 0.0;
std::size_t g_fundamentals = 0;

Characteristic characteristic_checked(const Problem& p) {
    Characteristic ch = compute_characteristic(p, kCfg);
    g_liouville = std::max(g_liouville, liouville_defect(ch.Y, p.A, SampleGrid(p.interval, 21).points(), kCfg));
    ++g_fundamentals;
    return ch;
}

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
};

int g_failures = 0;

void report(int id, const std::string& title, const std::function<void(Outcome&)>& body) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail << " exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++g_failures;
    std::printf("%s criterion %d: %s |%s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, title.c_str(),
                o.detail.str().c_str(), secs);
    std::fflush(stdout);
}

/// Time-dependent m x m coefficient with random entries.
MatrixFunction varying_coefficient(int m, int order) {
    std::vector<std::vector<std::string>> rows(m, std::vector<std::string>(m));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            std::ostringstream s;
            s.precision(17);
            s << uniform(-1, 1) << "*cos(" << uniform(0, 2) << "*t) + " << uniform(-1, 1) << "*t";
            rows[i][j] = s.str();
        }
    return expr::MatrixExpr::parse(rows).to_function(order);
}

/// l x m matrix of the given rank.
CMatrix with_rank(int l, int m, int r) { return random_complex(l, r) * random_complex(r, m); }

struct Family {
    ProblemSequence seq;
    std::string label;
};

std::vector<Family> generic_families(int count, double scale) {
    std::vector<Family> out;
    for (int i = 0; i < count; ++i) {
        const int m = uniform_int(1, 3);
        const int l = uniform_int(1, 3);
        const bool time_dependent = i % 2 == 1;
        const MatrixFunction A = time_dependent ? varying_coefficient(m, 2) : MatrixFunction::constant(random_complex(m, m));
        const bool deficient = i % 3 == 0;
        const CMatrix C0 = deficient ? with_rank(l, m, std::max(0, std::min(l, m) - 1)) : random_complex(l, m);
        const CMatrix C1 = deficient ? CMatrix::Zero(l, m) : random_complex(l, m);
        auto p = make_problem(kUnit, 1, A, {point(C0, 0.0), point(C1, 1.0)}, CVector::Zero(l));
        Perturbation d;
        d.deltaA = MatrixFunction::constant(scale * random_complex(m, m));
        d.deltaTerms = {TermPerturbation{scale * random_complex(l, m), std::nullopt}, TermPerturbation{}};
        std::ostringstream label;
        label << "m=" << m << ",l=" << l << (deficient ? ",deficient" : "") << (time_dependent ? ",A(t)" : "");
        out.push_back({ProblemSequence{p, d, 64}, label.str()});
    }
    return out;
}

/// Evaluates every member directly so its fundamental matrix enters the
/// Liouville bookkeeping, and cross-checks the sequence report.
void check_members(const ProblemSequence& seq, const ConvergenceReport& rep, Outcome& o) {
    const CMatrix M = characteristic_checked(seq.limit).M;
    for (int k = 1; k <= seq.K; ++k) {
        const CMatrix Mk = characteristic_checked(seq.at(k)).M;
        const double d = matrix_norm(Mk - M);
        if (std::abs(d - rep.rows[static_cast<std::size_t>(k - 1)].distance) > 1e-12 * (1.0 + d)) {
            o.pass = false;
            o.detail << " member " << k << " disagrees with the sequence report;";
        }
    }
}

struct Run {
    int code = -1;
    std::string out;
};

Run cli(const std::string& args) {
    const std::string cmd = std::string("\"") + CHARBVP_CLI + "\" " + args + " 2>/dev/null";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

}  // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();

    report(1, "constant-coefficient one-point condition matches sum alpha_j (-A)^j", [](Outcome& o) {
        double worst = 0.0;
        for (int trial = 0; trial < 50; ++trial) {
            const int m = uniform_int(1, 4);
            const int l = uniform_int(1, 4);
            const int n = uniform_int(1, 3);
            const CMatrix A = random_complex(m, m);
            // Half the instances read the derivatives at a, where Y^(j)(a) =
            // (-A)^j. The others read them at an interior point t0, where the
            // oracle needs Y(t0) = exp((a - t0) A) from the Pade exponential.
            const double at = trial % 2 ? uniform(0.0, 1.0) : 0.0;
            std::vector<CMatrix> alpha;
            std::vector<BoundaryTerm> terms;
            for (int j = 0; j <= n; ++j) {
                alpha.push_back(random_complex(l, m));
                terms.push_back(point(alpha.back(), at, j));
            }
            const auto p = make_problem(kUnit, n, A, terms, CVector::Zero(l));
            const CMatrix oracle = testsupport::one_point_oracle(A, alpha) * testsupport::expm((kUnit.a() - at) * A);
            const CMatrix M = characteristic_checked(p).M;
            const double dev = matrix_norm(M - oracle) / (1.0 + matrix_norm(oracle));
            worst = std::max(worst, dev);
        }
        o.pass = worst <= 1e-7;
        o.detail << " 50 instances, max |M - oracle| / (1 + |oracle|) = " << worst << " (bound 1e-7)";
    });

    report(2, "multipoint Caputo condition with A = 0 gives sum beta_{j,0}", [](Outcome& o) {
        const double orders[] = {0.4, 0.5, 1.5};
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const int m = uniform_int(1, 3);
            const int l = uniform_int(1, 3);
            const int N = uniform_int(1, 3);
            CMatrix oracle = CMatrix::Zero(l, m);
            std::vector<BoundaryTerm> terms;
            for (int j = 0; j < N; ++j) {
                const double tj = uniform(0.0, 0.95);
                const CMatrix b0 = random_complex(l, m);
                oracle += b0;
                terms.push_back(caputo(b0, tj, 0.0));
                const int extra = uniform_int(1, 3);
                for (int i = 0; i < extra; ++i) terms.push_back(caputo(random_complex(l, m), tj, orders[uniform_int(0, 2)]));
            }
            const auto p = make_problem(kUnit, 2, CMatrix::Zero(m, m), terms, CVector::Zero(l));
            worst = std::max(worst, matrix_norm(characteristic_checked(p).M - oracle));
        }
        o.pass = worst <= 1e-6;
        o.detail << " 20 instances, max |M - sum beta_{j,0}| = " << worst << " (bound 1e-6)";
    });

    report(3, "dimKer - dimCoker = m - l for every report", [](Outcome& o) {
        int square = 0, rectangular = 0, violations = 0, deficient = 0;
        for (int trial = 0; trial < 200; ++trial) {
            const int m = uniform_int(1, 4);
            const int l = trial % 2 ? m : uniform_int(1, 5);
            const bool engineered = trial % 5 == 0;
            const MatrixFunction A = engineered ? MatrixFunction::zero(m, m)
                                                : (trial % 3 ? MatrixFunction::constant(random_complex(m, m))
                                                             : varying_coefficient(m, 0));
            std::vector<BoundaryTerm> terms;
            if (engineered) {
                // rank-deficient: M is the coefficient itself
                terms.push_back(point(with_rank(l, m, uniform_int(0, std::min(l, m))), uniform(0, 1)));
            } else {
                terms.push_back(point(random_complex(l, m), 0.0));
                terms.push_back(point(random_complex(l, m), 1.0));
            }
            const auto p = make_problem(kUnit, 1, A, terms, CVector::Zero(l));
            const CharReport r = d_characteristics(characteristic_checked(p).M);
            (l == m ? square : rectangular)++;
            if (r.rank < std::min(l, m)) ++deficient;
            if (r.dimKer - r.dimCoker != m - l) ++violations;
        }
        o.pass = violations == 0;
        o.detail << " 200 problems (" << square << " square, " << rectangular << " rectangular, " << deficient
                 << " rank-deficient), violations = " << violations;
    });

    report(4, "solve finds m - rank M independent homogeneous solutions with small residuals", [](Outcome& o) {
        int mismatches = 0;
        double worst_ode = 0.0, worst_bc = 0.0;
        int total_kernel = 0;
        for (int trial = 0; trial < 30; ++trial) {
            const int m = uniform_int(1, 4);
            const int l = uniform_int(1, 4);
            const MatrixFunction A = trial % 2 ? varying_coefficient(m, 1) : MatrixFunction::constant(random_complex(m, m));
            std::vector<BoundaryTerm> terms;
            if (trial % 3 == 0) {
                terms.push_back(point(with_rank(l, m, uniform_int(0, std::min(l, m))), 0.0));
            } else {
                terms.push_back(point(random_complex(l, m), 0.0));
                terms.push_back(point(random_complex(l, m), 1.0, uniform_int(0, 1)));
            }
            const auto p = make_problem(kUnit, 1, A, terms, testsupport::random_vector(l));
            const Solution s = solve(p);
            characteristic_checked(p);
            // independence of the returned trajectories: rank of their samples
            const auto grid = SampleGrid(kUnit, 9).points();
            CMatrix samples(static_cast<Eigen::Index>(grid.size()) * m, static_cast<Eigen::Index>(s.kernelBasis.size()));
            for (std::size_t i = 0; i < s.kernelBasis.size(); ++i)
                for (std::size_t g = 0; g < grid.size(); ++g)
                    samples.block(static_cast<Eigen::Index>(g) * m, static_cast<Eigen::Index>(i), m, 1) =
                        s.kernelBasis[i].value(grid[g]);
            const int independent = s.kernelBasis.empty() ? 0 : numerical_rank(samples).rank;
            if (independent != m - s.report.rank) ++mismatches;
            total_kernel += independent;
            for (const auto& r : s.kernelResiduals) {
                worst_ode = std::max(worst_ode, r.ode);
                worst_bc = std::max(worst_bc, r.boundary);
            }
        }
        o.pass = mismatches == 0 && worst_ode <= 1e-7 && worst_bc <= 1e-7;
        o.detail << " 30 problems, " << total_kernel << " kernel trajectories, count mismatches = " << mismatches
                 << ", max ode residual = " << worst_ode << ", max boundary residual = " << worst_bc << " (bound 1e-7)";
    });

    report(5, "square problems: unique solution exactly when M is invertible", [](Outcome& o) {
        int disagreements = 0, singular = 0, invertible = 0;
        for (int trial = 0; trial < 50; ++trial) {
            const int m = uniform_int(1, 4);
            std::vector<BoundaryTerm> terms;
            MatrixFunction A = MatrixFunction::zero(m, m);
            if (trial < 5) {
                // engineered singular cases
                if (trial % 2 == 0) {
                    terms = {point(CMatrix::Identity(m, m), 0.0), point(-CMatrix::Identity(m, m), 1.0)};
                } else {
                    terms = {point(with_rank(m, m, m - 1), 0.0)};
                }
            } else {
                A = trial % 2 ? varying_coefficient(m, 0) : MatrixFunction::constant(random_complex(m, m));
                terms = {point(random_complex(m, m), 0.0), point(random_complex(m, m), 1.0)};
            }
            const auto p = make_problem(kUnit, 1, A, terms, testsupport::random_vector(m));
            const Solution s = solve(p);
            characteristic_checked(p);
            (s.report.invertible ? invertible : singular)++;
            if ((s.kind == SolutionKind::unique) != s.report.invertible) ++disagreements;
        }
        o.pass = disagreements == 0 && singular >= 5;
        o.detail << " 50 instances (" << invertible << " invertible, " << singular << " singular), disagreements = "
                 << disagreements;
    });

    report(6, "M_k -> M along ten 1/k perturbation families", [](Outcome& o) {
        const auto families = generic_families(10, 0.5);
        int failures = 0;
        double worst_ratio = 0.0;
        for (const auto& fam : families) {
            const ConvergenceReport rep = run_sequence(fam.seq);
            check_members(fam.seq, rep, o);
            const double first = rep.rows.front().distance, last = rep.rows.back().distance;
            const double bound = std::max(10.0 * kCfg.relTol, 0.05 * first);
            bool decreasing = true;
            for (std::size_t i = 1; i < rep.rows.size(); ++i)
                decreasing = decreasing && rep.rows[i].distance <= rep.rows[i - 1].distance + 1e-9;
            const bool ok = rep.matrixConverges && decreasing && last <= bound;
            if (!ok) {
                ++failures;
                o.detail << " [" << fam.label << ": d_1=" << first << " d_64=" << last << "]";
            }
            if (first > 0) worst_ratio = std::max(worst_ratio, last / first);
        }
        o.pass = o.pass && failures == 0;
        o.detail << " 10 families, K = 64, failing = " << failures << ", max d_64/d_1 = " << worst_ratio
                 << " (bound 0.05)";
    });

    report(7, "dimKer_k <= dimKer and dimCoker_k <= dimCoker", [](Outcome& o) {
        // engineered rank drop: periodic condition, A_k = I/k
        const int m = 2;
        auto p = make_problem(kUnit, 1, CMatrix::Zero(m, m),
                              {point(CMatrix::Identity(m, m), 0.0), point(-CMatrix::Identity(m, m), 1.0)}, CVector::Zero(m));
        Perturbation d;
        d.deltaA = MatrixFunction::constant(CMatrix::Identity(m, m));
        const ProblemSequence periodic{p, d, 64};
        const ConvergenceReport rep = run_sequence(periodic);
        check_members(periodic, rep, o);
        bool all_k = true, strict = false;
        for (const auto& row : rep.rows) {
            all_k = all_k && row.report.dimKer <= rep.limit.dimKer && row.report.dimCoker <= rep.limit.dimCoker;
            strict = strict || row.report.dimKer < rep.limit.dimKer;
        }
        o.pass = o.pass && all_k && strict && rep.thresholdK == 1;
        o.detail << " periodic: dimKer " << rep.limit.dimKer << " -> " << rep.rows.back().report.dimKer
                 << " (all k: " << (all_k ? "yes" : "no") << ", strict: " << (strict ? "yes" : "no") << ");";

        const auto families = generic_families(10, 0.5);
        o.detail << " generic thresholdK =";
        for (const auto& fam : families) {
            const ConvergenceReport r = run_sequence(fam.seq);
            check_members(fam.seq, r, o);
            bool holds = r.thresholdK <= fam.seq.K;
            for (const auto& row : r.rows)
                if (row.k >= r.thresholdK)
                    holds = holds && row.report.dimKer <= r.limit.dimKer && row.report.dimCoker <= r.limit.dimCoker &&
                            row.report.rank >= r.limit.rank;
            o.pass = o.pass && holds;
            o.detail << " " << r.thresholdK << (holds ? "" : "!");
        }
    });

    report(8, "Liouville identity and Caputo sanity", [](Outcome& o) {
        double killed = 0.0;
        const VectorFunction constant = VectorFunction::constant(testsupport::random_vector(3));
        for (double alpha : {0.3, 0.5, 1.5})
            for (double t : {0.0, 0.25, 0.5, 0.9})
                killed = std::max(killed, caputo_right(constant, alpha, t, 1.0).cwiseAbs().maxCoeff());
        const VectorFunction y = expr::MatrixExpr::parse({{"1 - t"}}).to_vector_function(2);
        const double value = caputo_right(y, 0.5, 0.0, 1.0)(0).real();
        const double closed = 1.0 / std::tgamma(1.5);
        o.pass = g_liouville <= 1e-6 && killed <= 1e-8 && std::abs(value - closed) <= 1e-7;
        o.detail.precision(11);
        o.detail << " Liouville max relative defect = " << g_liouville << " over " << g_fundamentals
                 << " fundamental matrices (bound 1e-6); constants -> " << killed << " (bound 1e-8); D^0.5(1-t)(0) = "
                 << value << " vs " << closed << " (bound 1e-7)";
    });

    report(9, "CLI determinism and exit codes", [](Outcome& o) {
        const fs::path data = fs::path(CHARBVP_SOURCE_DIR) / "data";
        int fixtures = 0, nondeterministic = 0, invalid = 0, wrong_code = 0;
        for (const auto& e : fs::directory_iterator(data / "examples")) {
            const std::string arg = "analyze \"" + e.path().string() + "\"";
            const Run a = cli(arg), b = cli(arg);
            ++fixtures;
            if (a.code != 0 || a.out.empty() || a.out != b.out) ++nondeterministic;
        }
        for (const auto& e : fs::directory_iterator(data / "invalid")) {
            ++invalid;
            if (cli("analyze \"" + e.path().string() + "\"").code != 2) ++wrong_code;
        }
        o.pass = fixtures > 0 && invalid > 0 && nondeterministic == 0 && wrong_code == 0;
        o.detail << " " << fixtures << " fixtures analyzed twice, differing = " << nondeterministic << "; " << invalid
                 << " invalid fixtures, exit code != 2: " << wrong_code;
    });

    const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%d of 9 criteria failed (%.1fs total)\n", g_failures, total);
    return g_failures == 0 ? 0 : 1;
}
