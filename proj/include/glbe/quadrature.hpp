#pragma once
// Adaptive Gauss-Kronrod integration, semi-infinite panel marching and Wynn's
// epsilon algorithm for accelerating slowly converging partial sums.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "glbe/errors.hpp"

namespace glbe {

struct QuadratureReport {
    double value = 0.0;
    double est_error = 0.0;
    int panels_used = 0;
    int extrapolation_order = 0;
};

struct QuadratureOptions {
    double abs_tol = 1e-14;
    double rel_tol = 1e-12;
    int max_subdivisions = 2000;
};

namespace quad_detail {

inline constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> wg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                             0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

template <class F>
Segment kronrod15(F& f, double a, double b) {
    const double centre = 0.5 * (a + b), half = 0.5 * (b - a);
    const double fc = f(centre);
    double resk = fc * wgk[7];
    double resg = fc * wg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * xgk[j];
        const double f1 = f(centre - dx), f2 = f(centre + dx);
        resk += wgk[j] * (f1 + f2);
        if (j % 2 == 1) resg += wg[j / 2] * (f1 + f2);
    }
    const double value = resk * half;
    const double error = std::abs((resk - resg) * half);
    return {a, b, value, error};
}

}  // namespace quad_detail

// Adaptive G7-K15 integration over a finite interval.
template <class F>
QuadratureReport integrate(F&& f, double a, double b, const QuadratureOptions& opt = {}) {
    if (a == b) return {};
    if (!(std::isfinite(a) && std::isfinite(b))) throw DomainError("integrate: interval must be finite");
    std::priority_queue<quad_detail::Segment> heap;
    quad_detail::Segment first = quad_detail::kronrod15(f, a, b);
    double total = first.value, error = first.error;
    heap.push(first);
    int count = 1;
    while (error > std::max(opt.abs_tol, opt.rel_tol * std::abs(total)) && count < opt.max_subdivisions) {
        const quad_detail::Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            heap.push(worst);
            break;
        }
        const quad_detail::Segment left = quad_detail::kronrod15(f, worst.a, mid);
        const quad_detail::Segment right = quad_detail::kronrod15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++count;
    }
    // Recompute the sums from the leaves to avoid drift from repeated updates.
    total = 0.0;
    error = 0.0;
    while (!heap.empty()) {
        total += heap.top().value;
        error += heap.top().error;
        heap.pop();
    }
    if (!std::isfinite(total)) throw NumericError("integrate: non-finite integrand value");
    return {total, error, count, 0};
}

struct TailOptions {
    double scale = 1.0;        // width of the first panel
    double growth = 2.0;       // panel width multiplier
    double abs_tol = 1e-15;
    double rel_tol = 1e-13;
    int max_panels = 200;
    QuadratureOptions panel{1e-16, 1e-13, 400};
};

// Integral over [a, infinity) by geometrically growing panels, stopping once
// consecutive panels are negligible relative to the accumulated value.
template <class F>
QuadratureReport integrate_to_infinity(F&& f, double a, const TailOptions& opt = {}) {
    double left = a, width = opt.scale, total = 0.0, error = 0.0;
    int quiet = 0, panels = 0;
    for (; panels < opt.max_panels; ++panels) {
        const double right = left + width;
        const QuadratureReport piece = integrate(f, left, right, opt.panel);
        total += piece.value;
        error += piece.est_error;
        const double tol = std::max(opt.abs_tol, opt.rel_tol * std::abs(total));
        quiet = std::abs(piece.value) <= tol ? quiet + 1 : 0;
        left = right;
        width *= opt.growth;
        if (quiet >= 3) return {total, error, panels + 1, 0};
    }
    throw NumericError("integrate_to_infinity: tail not negligible after " + std::to_string(opt.max_panels) +
                       " panels (last partial value " + std::to_string(total) + ")");
}

struct Extrapolation {
    double value = 0.0;
    double error = std::numeric_limits<double>::infinity();
    int order = 0;
};

// Wynn's epsilon algorithm applied to a sequence of partial sums; returns the
// highest-order even-column estimate that uses the last term.
inline Extrapolation wynn_epsilon(std::span<const double> sums) {
    const std::size_t n = sums.size();
    if (n == 0) return {};
    if (n < 3) return {sums.back(), n == 2 ? std::abs(sums[1] - sums[0]) : std::numeric_limits<double>::infinity(), 0};
    std::vector<double> prev(n, 0.0);                       // column j-1
    std::vector<double> curr(sums.begin(), sums.end());      // column j
    std::vector<double> finals{curr.back()};                 // last element of each even column
    for (std::size_t col = 1; col < n; ++col) {
        std::vector<double> next(n - col);
        bool ok = true;
        for (std::size_t k = 0; k + 1 < curr.size(); ++k) {
            const double diff = curr[k + 1] - curr[k];
            if (diff == 0.0 || !std::isfinite(diff)) {
                ok = false;
                break;
            }
            next[k] = prev[k + 1] + 1.0 / diff;
        }
        if (!ok) break;
        prev = std::move(curr);
        curr = std::move(next);
        if (col % 2 == 0) {
            if (!std::isfinite(curr.back())) break;
            finals.push_back(curr.back());
        }
    }
    Extrapolation out;
    out.value = finals.back();
    out.order = static_cast<int>(finals.size() - 1);
    if (finals.size() >= 2) {
        out.error = std::abs(finals.back() - finals[finals.size() - 2]);
    } else {
        out.error = std::abs(sums[n - 1] - sums[n - 2]);
    }
    return out;
}

}  // namespace glbe
