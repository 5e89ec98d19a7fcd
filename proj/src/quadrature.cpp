#include "charbvp/quadrature.hpp"

#include <array>
#include <cmath>
#include <queue>

namespace charbvp {

namespace {

constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kKronrod = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for nodes 1, 3, 5 and the centre.
constexpr std::array<double, 4> kGauss = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                          0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Piece {
    double lo;
    double hi;
    CMatrix value;
    double error;

    bool operator<(const Piece& other) const { return error < other.error; }
};

Piece gauss_kronrod(const std::function<CMatrix(double)>& f, double lo, double hi) {
    const double centre = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const CMatrix fc = f(centre);
    CMatrix kronrod = kKronrod[7] * fc;
    CMatrix gauss = kGauss[3] * fc;
    for (int k = 0; k < 7; ++k) {
        const double dx = half * kNodes[static_cast<std::size_t>(k)];
        const CMatrix pair = f(centre - dx) + f(centre + dx);
        kronrod += kKronrod[static_cast<std::size_t>(k)] * pair;
        if (k % 2 == 1) gauss += kGauss[static_cast<std::size_t>(k / 2)] * pair;
    }
    kronrod *= half;
    gauss *= half;
    const double err = (kronrod - gauss).cwiseAbs().maxCoeff();
    return Piece{lo, hi, std::move(kronrod), err};
}

}  // namespace

CMatrix integrate(const std::function<CMatrix(double)>& f, double lo, double hi, const QuadratureSpec& spec) {
    if (lo == hi) {
        const CMatrix probe = f(lo);
        return CMatrix::Zero(probe.rows(), probe.cols());
    }
    std::priority_queue<Piece> pieces;
    Piece first = gauss_kronrod(f, lo, hi);
    CMatrix total = first.value;
    double error = first.error;
    pieces.push(std::move(first));
    int subdivisions = 0;
    while (error > std::max(spec.absTol, spec.relTol * total.cwiseAbs().maxCoeff())) {
        if (++subdivisions > spec.maxSubdivisions) throw NumericalError("quadrature did not converge");
        Piece worst = pieces.top();
        pieces.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        Piece left = gauss_kronrod(f, worst.lo, mid);
        Piece right = gauss_kronrod(f, mid, worst.hi);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        pieces.push(std::move(left));
        pieces.push(std::move(right));
        if (!std::isfinite(error)) throw NumericalError("quadrature produced non-finite values");
    }
    // Re-sum to shed the accumulated cancellation of the running total.
    CMatrix sum = CMatrix::Zero(total.rows(), total.cols());
    while (!pieces.empty()) {
        sum += pieces.top().value;
        pieces.pop();
    }
    return sum;
}

}  // namespace charbvp
