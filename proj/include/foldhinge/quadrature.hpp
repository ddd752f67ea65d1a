#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <vector>

#include "foldhinge/error.hpp"

namespace foldhinge::quadrature {

struct Tolerance {
    double absolute = 1e-10;
    double relative = 1e-8;
    std::size_t max_intervals = 4000;
};

struct Result {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t intervals = 0;
    std::size_t evaluations = 0;
};

namespace detail {

// 15-point Kronrod abscissae on [-1, 1] (positive half, descending) and the
// embedded 7-point Gauss weights on the even-indexed nodes.
inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a;
    double b;
    double value;
    double error;

    bool operator<(const Segment& other) const { return error < other.error; }
};

template <class F>
Segment gauss_kronrod_15(const F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    const double f_center = f(center);
    double kronrod = kronrod_weights[7] * f_center;
    double gauss = gauss_weights[3] * f_center;

    for (std::size_t i = 0; i < 7; ++i) {
        const double dx = half * kronrod_nodes[i];
        const double pair = f(center - dx) + f(center + dx);
        kronrod += kronrod_weights[i] * pair;
        if (i % 2 == 1) {
            gauss += gauss_weights[i / 2] * pair;
        }
    }
    return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (G7/K15) integration of f over [a, b].
///
/// The interval with the largest error estimate is bisected until the summed
/// estimate drops below max(absolute, relative * |integral|). Throws
/// ErrorKind::NonConvergence if the interval budget runs out first.
template <class F>
Result integrate(const F& f, double a, double b, const Tolerance& tol = {}) {
    if (!(std::isfinite(a) && std::isfinite(b))) {
        fail(ErrorKind::InvalidArgument, "quadrature bounds must be finite");
    }
    Result result;
    if (a == b) {
        return result;
    }

    std::priority_queue<detail::Segment> segments;
    segments.push(detail::gauss_kronrod_15(f, a, b));
    double total = segments.top().value;
    double total_error = segments.top().error;
    result.evaluations = 15;

    while (true) {
        const double target = std::max(tol.absolute, tol.relative * std::abs(total));
        if (total_error <= target) {
            break;
        }
        if (segments.size() >= tol.max_intervals) {
            fail(ErrorKind::NonConvergence,
                 "adaptive quadrature did not reach tolerance within the interval budget");
        }
        const detail::Segment worst = segments.top();
        segments.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const auto left = detail::gauss_kronrod_15(f, worst.a, mid);
        const auto right = detail::gauss_kronrod_15(f, mid, worst.b);
        result.evaluations += 30;

        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        segments.push(left);
        segments.push(right);
    }

    // Re-sum from the leaves so the reported value carries no running-update drift.
    double value = 0.0;
    double error = 0.0;
    result.intervals = segments.size();
    while (!segments.empty()) {
        value += segments.top().value;
        error += segments.top().error;
        segments.pop();
    }
    result.value = value;
    result.error_estimate = error;
    return result;
}

}  // namespace foldhinge::quadrature
