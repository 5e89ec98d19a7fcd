#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "charbvp/analysis.hpp"
#include "charbvp/boundary.hpp"
#include "charbvp/expr.hpp"
#include "charbvp/parallel.hpp"
#include "support.hpp"

using namespace charbvp;
using testsupport::caputo;
using testsupport::point;

namespace {

VectorFunction vec(const std::vector<std::string>& entries, int order = 4) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& e : entries) rows.push_back({e});
    return expr::MatrixExpr::parse(rows).to_vector_function(order);
}

CMatrix scalar(Complex z) { return CMatrix::Constant(1, 1, z); }

IntegralTerm integral(const std::vector<std::vector<std::string>>& weight, int order = 0) {
    return IntegralTerm{expr::MatrixExpr::parse(weight), order, {}};
}

double max_abs(const CMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

TEST_CASE("apply examples") {
    const Interval iv(0.0, 1.0);
    SUBCASE("point evaluation of a constant") {
        const BoundaryOperator B(3, 3, {point(CMatrix::Identity(3, 3), 0.0)});
        const CVector out = B.apply(VectorFunction::constant(CVector::Ones(3)), iv);
        CHECK(max_abs(out - CVector::Ones(3)) == 0.0);
    }
    SUBCASE("y(a) + y'(a) kills e^{-t}") {
        const BoundaryOperator B(1, 1, {point(scalar(1), 0.0, 0), point(scalar(1), 0.0, 1)});
        CHECK(std::abs(B.apply(vec({"exp(-t)"}), iv)(0)) <= 1e-15);
    }
    SUBCASE("integral of t") {
        const BoundaryOperator B(1, 1, {integral({{"1"}})});
        CHECK(std::abs(B.apply(vec({"t"}), iv)(0) - 0.5) <= 1e-14);
    }
    SUBCASE("weighted integral of a derivative") {
        // int_0^1 t * (t^2)' dt = 2/3
        const BoundaryOperator B(1, 1, {integral({{"t"}}, 1)});
        CHECK(std::abs(B.apply(vec({"t^2"}), iv)(0) - 2.0 / 3.0) <= 1e-14);
    }
}

TEST_CASE("inputSmoothness and validation") {
    const Interval iv(0.0, 1.0);
    const BoundaryOperator B(1, 1, {point(scalar(1), 0.5, 2), caputo(scalar(1), 0.2, 1.5), integral({{"1"}}, 1)});
    CHECK(B.inputSmoothness() == 2);
    CHECK_NOTHROW(B.validate(iv, 2));
    CHECK_THROWS_AS(B.validate(iv, 1), ValidationError);

    CHECK(caputo_required_order(0.0) == 0);
    CHECK(caputo_required_order(1.0) == 1);
    CHECK(caputo_required_order(0.4) == 1);
    CHECK(caputo_required_order(1.5) == 2);

    // floor(alpha) must stay below n
    CHECK_THROWS_AS(BoundaryOperator(1, 1, {caputo(scalar(1), 0.2, 2.5)}).validate(iv, 2), ValidationError);
    CHECK_THROWS_AS(BoundaryOperator(1, 1, {point(scalar(1), 1.5, 0)}).validate(iv, 1), ValidationError);
    CHECK_THROWS_AS(BoundaryOperator(1, 1, {caputo(scalar(1), 0.2, -0.5)}).validate(iv, 1), ValidationError);
    CHECK_THROWS_AS(BoundaryOperator(2, 1, {point(scalar(1), 0.0)}), ValidationError);
}

TEST_CASE("Caputo power-function value") {
    // right-sided Caputo derivative of order 1/2 of 1 - t at t = 0 on [0, 1]
    const VectorFunction y = vec({"1 - t"});
    const Complex got = caputo_right(y, 0.5, 0.0, 1.0)(0);
    const double closed_form = 1.0 / std::tgamma(1.5);
    CHECK(closed_form == doctest::Approx(1.1283791671).epsilon(1e-10));
    CHECK(std::abs(got - closed_form) <= 1e-7);
    // the same number from the brute-force oracle
    const Complex brute = testsupport::caputo_bruteforce([](double) { return Complex(-1.0); }, 0.5, 0.0, 1.0);
    CHECK(std::abs(brute - closed_form) <= 1e-12);
}

TEST_CASE("Caputo power-function formula for other exponents") {
    // D^alpha (b - s)^beta = Gamma(beta + 1) / Gamma(beta + 1 - alpha) (b - t)^(beta - alpha)
    const double b = 2.0;
    for (double beta : {2.0, 2.5, 3.0}) {
        const VectorFunction y = vec({"(2 - t)^" + std::to_string(beta)});
        for (double alpha : {0.3, 0.5, 1.5}) {
            for (double t : {0.0, 0.7, 1.6}) {
                const double want = std::tgamma(beta + 1) / std::tgamma(beta + 1 - alpha) * std::pow(b - t, beta - alpha);
                CAPTURE(beta);
                CAPTURE(alpha);
                CAPTURE(t);
                CHECK(std::abs(caputo_right(y, alpha, t, b)(0) - want) <= 1e-7 * (1.0 + std::abs(want)));
            }
        }
    }
}

TEST_CASE("Caputo agrees with the brute-force oracle on smooth data") {
    const VectorFunction y = vec({"sin(3*t) + 1i*exp(t)"});
    const auto dy = [](double s) { return Complex(3 * std::cos(3 * s), std::exp(s)); };
    const auto d2y = [](double s) { return Complex(-9 * std::sin(3 * s), std::exp(s)); };
    for (double alpha : {0.4, 0.5, 0.9, 1.5}) {
        for (double t : {0.0, 0.3, 0.75}) {
            const Complex got = caputo_right(y, alpha, t, 1.0)(0);
            const Complex want = testsupport::caputo_bruteforce(alpha < 1 ? std::function<Complex(double)>(dy) : d2y,
                                                                alpha, t, 1.0);
            CAPTURE(alpha);
            CAPTURE(t);
            CHECK(std::abs(got - want) <= 1e-8);
        }
    }
}

TEST_CASE("Caputo kills constants") {
    const VectorFunction y = VectorFunction::constant(testsupport::random_vector(3));
    for (double alpha : {0.3, 0.5, 1.5}) {
        for (double t : {0.0, 0.1, 0.5, 0.99}) CHECK(max_abs(caputo_right(y, alpha, t, 1.0)) <= 1e-8);
    }
}

TEST_CASE("Caputo order zero is the identity and integer orders are classical") {
    const VectorFunction y = vec({"exp(-2*t)*cos(t)", "t^3"});
    for (double t : {0.0, 0.4, 0.9}) {
        CHECK(max_abs(caputo_right(y, 0.0, t, 1.0) - y(t, 0)) == 0.0);
        for (int k = 1; k <= 3; ++k) {
            const CVector want = ((k % 2) ? -1.0 : 1.0) * y(t, k);
            CHECK(max_abs(caputo_right(y, k, t, 1.0) - want) <= 1e-9);
        }
    }
}

TEST_CASE("linearity for random term mixes") {
    const Interval iv(-0.5, 1.0);
    const VectorFunction y = vec({"sin(t)", "exp(t) + 1i*t^2"});
    const VectorFunction z = vec({"1/(2+t)", "cos(3*t)"});
    for (int trial = 0; trial < 10; ++trial) {
        const int l = testsupport::uniform_int(1, 3);
        std::vector<BoundaryTerm> terms;
        terms.push_back(point(testsupport::random_complex(l, 2), testsupport::uniform(-0.5, 1.0), testsupport::uniform_int(0, 2)));
        terms.push_back(caputo(testsupport::random_complex(l, 2), testsupport::uniform(-0.5, 0.9), 0.5));
        terms.push_back(caputo(testsupport::random_complex(l, 2), testsupport::uniform(-0.5, 0.9), 1.4));
        std::vector<std::vector<std::string>> w(l, std::vector<std::string>{"t", "exp(-t)"});
        terms.push_back(integral(w, testsupport::uniform_int(0, 1)));
        const BoundaryOperator B(l, 2, std::move(terms));
        const Complex lambda = Complex(testsupport::uniform(-2, 2), testsupport::uniform(-2, 2));
        const Complex mu = Complex(testsupport::uniform(-2, 2), testsupport::uniform(-2, 2));
        const CVector lhs = B.apply(lambda * y + mu * z, iv);
        const CVector rhs = lambda * B.apply(y, iv) + mu * B.apply(z, iv);
        CHECK(vector_norm(lhs - rhs) <= 1e-10 * (1.0 + vector_norm(rhs)));
    }
}

TEST_CASE("apply_columnwise examples") {
    const Interval iv(0.0, 1.0);
    const IntegratorConfig cfg;
    const Trajectory Y = fundamental_matrix(MatrixFunction::zero(2, 2), iv, cfg);
    const MatrixFunction Yf = with_derivatives(Y, MatrixFunction::zero(2, 2), std::nullopt);
    const BoundaryOperator at_a(2, 2, {point(CMatrix::Identity(2, 2), 0.0)});
    CHECK(max_abs(apply_columnwise(at_a, Yf, iv) - CMatrix::Identity(2, 2)) == 0.0);
    const BoundaryOperator periodic(2, 2, {point(CMatrix::Identity(2, 2), 0.0), point(-CMatrix::Identity(2, 2), 1.0)});
    CHECK(max_abs(apply_columnwise(periodic, Yf, iv)) == 0.0);
}

TEST_CASE("columnwise application commutes with combination") {
    const Interval iv(0.0, 1.0);
    const IntegratorConfig cfg;
    const MatrixFunction A = expr::MatrixExpr::parse({{"t", "1", "0"}, {"0", "sin(t)", "-1"}, {"1i", "0", "0.5"}}).to_function(3);
    const Trajectory Y = fundamental_matrix(A, iv, cfg);
    const MatrixFunction Yf = with_derivatives(Y, A, std::nullopt);
    const BoundaryOperator B(2, 3,
                             {point(testsupport::random_complex(2, 3), 0.3, 2), caputo(testsupport::random_complex(2, 3), 0.1, 0.5),
                              integral({{"1", "t", "t^2"}, {"cos(t)", "0", "1"}}, 1)});
    const CMatrix M = apply_columnwise(B, Yf, iv);
    for (int trial = 0; trial < 5; ++trial) {
        const CVector q = testsupport::random_vector(3);
        const VectorFunction Yq(3, 1, Yf.maxDerivOrder(), [Yf, q](double t, int order) -> CVector { return Yf(t, order) * q; });
        const CVector direct = B.apply(Yq, iv);
        CHECK(vector_norm(M * q - direct) <= 1e-10 * (1.0 + vector_norm(direct)));
    }
    // the block kernel and the per-column kernel agree
    CHECK(max_abs(B.apply(Yf, iv) - M) <= 1e-12 * (1.0 + max_abs(M)));
}

TEST_CASE("parallel columnwise matches the serial reference") {
    const Interval iv(0.0, 1.0);
    const IntegratorConfig cfg;
    const MatrixFunction A = expr::MatrixExpr::parse({{"t", "1"}, {"-1", "0.5"}}).to_function(3);
    const Trajectory Y = fundamental_matrix(A, iv, cfg);
    const MatrixFunction Yf = with_derivatives(Y, A, std::nullopt);
    const BoundaryOperator B(3, 2, {point(testsupport::random_complex(3, 2), 1.0, 1), caputo(testsupport::random_complex(3, 2), 0.5, 1.5)});
    for (int jobs : {1, 2, 4}) {
        set_worker_count(jobs);
        CHECK(apply_columnwise(B, Yf, iv) == serial::apply_columnwise(B, Yf, iv));
    }
    set_worker_count(0);
}
