#pragma once

// Shared test helpers and independent oracles. Nothing here calls the
// library's integrator or quadrature, so the checks built on it are genuine
// cross-checks.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "charbvp/analysis.hpp"
#include "charbvp/boundary.hpp"
#include "charbvp/problem.hpp"

namespace testsupport {

using charbvp::CMatrix;
using charbvp::Complex;
using charbvp::CVector;

// ----------------------------------------------------------------- oracles

/// exp(X) by scaling and squaring with the diagonal (8, 8) Pade approximant.
/// After scaling |X| <= 1/2 the truncation error is far below 1e-16.
inline CMatrix expm(const CMatrix& X) {
    const Eigen::Index n = X.rows();
    const double norm = X.cwiseAbs().colwise().sum().maxCoeff();
    int s = 0;
    if (norm > 0.5) s = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    const CMatrix A = X / std::ldexp(1.0, s);

    constexpr int q = 8;
    CMatrix N = CMatrix::Identity(n, n);
    CMatrix D = CMatrix::Identity(n, n);
    CMatrix P = CMatrix::Identity(n, n);
    double c = 1.0;
    for (int k = 1; k <= q; ++k) {
        c *= static_cast<double>(q - k + 1) / static_cast<double>(k * (2 * q - k + 1));
        P = A * P;
        N += c * P;
        D += ((k % 2) ? -c : c) * P;
    }
    CMatrix E = D.partialPivLu().solve(N);
    for (int k = 0; k < s; ++k) E = E * E;
    return E;
}

/// Exact rank of an integer matrix by fraction-free (Bareiss) elimination.
inline int bareiss_rank(std::vector<std::vector<std::int64_t>> a) {
    const std::size_t rows = a.size();
    if (rows == 0) return 0;
    const std::size_t cols = a[0].size();
    std::int64_t prev = 1;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t pivot = r;
        while (pivot < rows && a[pivot][c] == 0) ++pivot;
        if (pivot == rows) continue;
        std::swap(a[pivot], a[r]);
        for (std::size_t i = r + 1; i < rows; ++i) {
            for (std::size_t j = c + 1; j < cols; ++j)
                a[i][j] = (a[r][c] * a[i][j] - a[i][c] * a[r][j]) / prev;
            a[i][c] = 0;
        }
        prev = a[r][c];
        ++r;
    }
    return static_cast<int>(r);
}

/// Right-sided Caputo derivative by brute force, for the test oracle only.
/// With beta = nu - alpha and g = y^(nu), the singular part of
/// int_0^L s^(beta-1) g(t+s) ds is integrated exactly,
///
///     g(t) L^beta / beta + int_0^L s^(beta-1) (g(t+s) - g(t)) ds,
///
/// and the remaining integrand (bounded, ~ s^beta) by composite Simpson on a
/// mesh graded towards s = 0.
inline Complex caputo_bruteforce(const std::function<Complex(double)>& g, double alpha, double t, double b,
                                 int panels = 20000) {
    const int nu = static_cast<int>(std::floor(alpha)) + 1;
    const double beta = nu - alpha;
    const double L = b - t;
    const Complex g0 = g(t);
    Complex acc = g0 * std::pow(L, beta) / beta;
    auto h = [&](double s) -> Complex {
        if (s <= 0.0) return 0.0;
        return std::pow(s, beta - 1.0) * (g(t + s) - g0);
    };
    // s = L v^2 clusters the nodes near the endpoint.
    auto integrand = [&](double v) -> Complex { return h(L * v * v) * (2.0 * L * v); };
    const double dv = 1.0 / panels;
    Complex sum = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double v0 = i * dv;
        sum += (integrand(v0) + 4.0 * integrand(v0 + 0.5 * dv) + integrand(v0 + dv)) * (dv / 6.0);
    }
    acc += sum;
    const double sign = (nu % 2) ? -1.0 : 1.0;
    return sign * acc / std::tgamma(beta);
}

/// Central difference of a vector-valued function.
template <class F>
auto central_difference(F&& f, double t, double h) {
    // evaluate before the temporaries go out of scope
    using Result = std::decay_t<decltype(f(t))>;
    return Result((f(t + h) - f(t - h)) / (2.0 * h));
}

// ---------------------------------------------------------------- builders

inline std::mt19937_64& rng() {
    static std::mt19937_64 engine(20240611ULL);
    return engine;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }
inline int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng()); }

inline CMatrix random_complex(Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
    CMatrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = Complex(uniform(-scale, scale), uniform(-scale, scale));
    return m;
}

inline CVector random_vector(Eigen::Index n, double scale = 1.0) { return random_complex(n, 1, scale).col(0); }

inline charbvp::PointTerm point(const CMatrix& coeff, double at, int order = 0) {
    return charbvp::PointTerm{coeff, at, order};
}

inline charbvp::CaputoTerm caputo(const CMatrix& coeff, double at, double order) {
    return charbvp::CaputoTerm{coeff, at, order, {}};
}

/// Problem with constant coefficient and zero forcing unless given.
inline charbvp::Problem make_problem(charbvp::Interval iv, int n, const charbvp::MatrixFunction& A,
                                     std::vector<charbvp::BoundaryTerm> terms, CVector c,
                                     std::optional<charbvp::VectorFunction> f = std::nullopt) {
    const auto m = A.rows();
    const auto l = c.size();
    charbvp::BoundaryOperator B(l, m, std::move(terms));
    charbvp::Problem p{iv,
                       charbvp::ProblemDims{static_cast<int>(m), static_cast<int>(l), n},
                       A,
                       f ? *f : charbvp::VectorFunction::zero(m),
                       std::move(B),
                       std::move(c)};
    p.validate();
    return p;
}

inline charbvp::Problem make_problem(charbvp::Interval iv, int n, const CMatrix& A,
                                     std::vector<charbvp::BoundaryTerm> terms, CVector c) {
    return make_problem(iv, n, charbvp::MatrixFunction::constant(A), std::move(terms), std::move(c));
}

/// Sum alpha_j (-A)^j, the closed form of M for a one-point condition at a
/// with constant A.
inline CMatrix one_point_oracle(const CMatrix& A, const std::vector<CMatrix>& alpha) {
    CMatrix power = CMatrix::Identity(A.rows(), A.cols());
    CMatrix out = CMatrix::Zero(alpha.front().rows(), A.cols());
    for (const auto& a : alpha) {
        out += a * power;
        power = (-A) * power;
    }
    return out;
}

inline double rel_dev(const CMatrix& got, const CMatrix& want) {
    return charbvp::matrix_norm(got - want) / (1.0 + charbvp::matrix_norm(want));
}

}  // namespace testsupport
