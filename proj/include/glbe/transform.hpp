#pragma once
// Radially symmetric Fourier transforms in d dimensions.
//
// With Lambda_d(t) = Gamma(d/2) (2/t)^{d/2-1} J_{d/2-1}(t) the pair reads
//   fbar(z) = int_0^inf Omega_d(r) f(r) Lambda_d(r z) dr,
//   f(r)    = (2 pi)^{-d} int_0^inf Omega_d(z) fbar(z) Lambda_d(r z) dz,
// which is the usual z^{1-d/2} (2 pi)^{d/2} int r^{d/2} J_{d/2-1}(rz) f dr form
// with the powers folded into the kernel so that Lambda_d(0) = 1.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <utility>
#include <vector>

#include "glbe/errors.hpp"
#include "glbe/quadrature.hpp"
#include "glbe/specfun.hpp"

namespace glbe {

enum class Decay { exponential, algebraic, compact_support };

// A radial function together with the hints the oscillatory integrator needs.
struct RadialFunction {
    std::function<double(double)> evaluator;
    Decay decay = Decay::exponential;
    double support = std::numeric_limits<double>::infinity();
    std::vector<double> breakpoints;  // kinks or integrable singularities inside the support

    double operator()(double r) const { return evaluator(r); }
};

struct TransformOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-300;
    int max_panels = 6000;
};

// Surface area of the sphere of radius r in d dimensions.
inline double omega(double d, double r) {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * d) * std::pow(r, d - 1.0) / std::tgamma(0.5 * d);
}

// Lambda_d(t) = 0F1(; d/2; -t^2/4).
inline double kernel_lambda(double d, double t) {
    t = std::abs(t);
    if (t < 0.5) {
        const double b = 0.5 * d, q = -0.25 * t * t;
        double term = 1.0, sum = 1.0;
        for (int j = 0; j < 30; ++j) {
            term *= q / ((b + j) * (j + 1.0));
            sum += term;
            if (std::abs(term) < 1e-17 * std::abs(sum)) break;
        }
        return sum;
    }
    if (d == 1.0) return std::cos(t);
    if (d == 3.0) return std::sin(t) / t;
    const double nu = 0.5 * d - 1.0;
    return std::tgamma(0.5 * d) * std::pow(2.0 / t, nu) * sf::bessel_j(nu, t);
}

// Lambda_d(i t) = 0F1(; d/2; t^2/4), the kernel continued to imaginary arguments.
inline double kernel_lambda_imag(double d, double t) {
    t = std::abs(t);
    if (t < 0.5) {
        const double b = 0.5 * d, q = 0.25 * t * t;
        double term = 1.0, sum = 1.0;
        for (int j = 0; j < 30; ++j) {
            term *= q / ((b + j) * (j + 1.0));
            sum += term;
            if (term < 1e-17 * sum) break;
        }
        return sum;
    }
    if (d == 1.0) return std::cosh(t);
    if (d == 3.0) return std::sinh(t) / t;
    const double nu = 0.5 * d - 1.0;
    return std::exp(std::lgamma(0.5 * d) + nu * std::log(2.0 / t) + t) * sf::bessel_i_scaled(nu, t);
}

namespace transform_detail {

// s-th positive zero of J_nu (s >= 1), McMahon's expansion polished by secant steps.
inline double bessel_zero(double nu, int s) {
    const double beta = (s + 0.5 * nu - 0.25) * std::numbers::pi;
    const double mu = 4.0 * nu * nu;
    const double e = 8.0 * beta;
    double guess = beta - (mu - 1.0) / e - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * e * e * e);
    if (nu == -0.5 || nu == 0.5) return beta;  // exact for the half-order kernels
    if (beta > 60.0) return guess;
    auto j = [nu](double t) { return sf::bessel_j(nu, t); };
    double x0 = guess, x1 = guess + 1e-3;
    double f0 = j(x0), f1 = j(x1);
    for (int it = 0; it < 30 && f1 != f0; ++it) {
        const double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = j(x1);
        if (std::abs(x1 - x0) < 1e-14 * x1) break;
    }
    // Keep the McMahon estimate if the secant wandered off to a neighbouring zero.
    return std::abs(x1 - guess) < 1.0 ? x1 : guess;
}

// Integral over [0, inf) (or [0, support]) of w(x) Lambda_d(x y), partitioned at
// the kernel's zeros and at the supplied breakpoints.
template <class W>
QuadratureReport hankel_integral(W&& w, double d, double y, Decay decay, double support,
                                 std::vector<double> breakpoints, const TransformOptions& opt) {
    std::sort(breakpoints.begin(), breakpoints.end());
    std::erase_if(breakpoints, [&](double b) { return !(b > 0.0) || !(b < support); });
    const QuadratureOptions panel_opt{0.0, 1e-13, 400};
    auto integrand = [&](double x) {
        const double v = w(x);
        return v == 0.0 ? 0.0 : v * kernel_lambda(d, x * y);
    };

    QuadratureReport out;
    double left = 0.0;
    std::size_t next_bp = 0;
    auto add_segment = [&](double a, double b) {
        const QuadratureReport piece = integrate(integrand, a, b, panel_opt);
        out.value += piece.value;
        out.est_error += piece.est_error;
        ++out.panels_used;
        return piece.value;
    };
    // Integrate up to x, honouring any breakpoints before it.
    auto advance_to = [&](double x) {
        double contribution = 0.0;
        while (next_bp < breakpoints.size() && breakpoints[next_bp] < x) {
            contribution += add_segment(left, breakpoints[next_bp]);
            left = breakpoints[next_bp++];
        }
        contribution += add_segment(left, x);
        left = x;
        return contribution;
    };

    if (y == 0.0) {
        if (std::isfinite(support)) {
            advance_to(support);
            return out;
        }
        const double start = breakpoints.empty() ? 0.0 : breakpoints.back();
        if (start > 0.0) advance_to(start);
        TailOptions tail;
        tail.rel_tol = opt.rel_tol * 1e-2;
        tail.abs_tol = opt.abs_tol;
        tail.max_panels = 400;
        const QuadratureReport rest = integrate_to_infinity(integrand, start, tail);
        out.value += rest.value;
        out.est_error += rest.est_error;
        out.panels_used += rest.panels_used;
        return out;
    }

    const double nu = 0.5 * d - 1.0;
    std::vector<double> partial;
    int quiet = 0;
    double last_estimate = std::numeric_limits<double>::quiet_NaN();
    int agree = 0;
    for (int s = 1; s <= opt.max_panels; ++s) {
        double knot = bessel_zero(nu, s) / y;
        bool last = false;
        if (knot >= support) {
            knot = support;
            last = true;
        }
        const double piece = advance_to(knot);
        if (last) return out;
        partial.push_back(out.value);
        const double tol = std::max(opt.abs_tol, opt.rel_tol * std::abs(out.value));
        quiet = std::abs(piece) <= 0.1 * tol ? quiet + 1 : 0;
        // Require a few quiet half-periods past every breakpoint before stopping.
        if (quiet >= 4 && next_bp >= breakpoints.size()) return out;
        if (decay != Decay::exponential && partial.size() >= 12 && partial.size() % 2 == 0) {
            const std::size_t window = std::min<std::size_t>(partial.size(), 40);
            const std::span<const double> tail(partial.data() + partial.size() - window, window);
            const Extrapolation ex = wynn_epsilon(tail);
            const double ex_tol = std::max(opt.abs_tol, opt.rel_tol * std::abs(ex.value));
            if (ex.error <= ex_tol && std::abs(ex.value - last_estimate) <= ex_tol) {
                if (++agree >= 2 && next_bp >= breakpoints.size()) {
                    out.value = ex.value;
                    out.est_error += ex.error;
                    out.extrapolation_order = ex.order;
                    return out;
                }
            } else {
                agree = 0;
            }
            last_estimate = ex.value;
        }
    }
    std::ostringstream msg;
    msg << "oscillatory transform did not converge after " << opt.max_panels << " panels (d=" << d << ", y=" << y
        << ", partial=" << out.value << ")";
    throw NumericError(msg.str());
}

}  // namespace transform_detail

// Forward transform of a radial function at frequency z >= 0.
inline QuadratureReport forward_ft(const RadialFunction& f, double d, double z, const TransformOptions& opt = {}) {
    if (!(z >= 0.0)) throw DomainError("forward_ft: z must be non-negative");
    if (!(d >= 1.0)) throw DomainError("forward_ft: d must be at least 1");
    auto w = [&](double r) { return omega(d, r) * f(r); };
    return transform_detail::hankel_integral(w, d, z, f.decay, f.support, f.breakpoints, opt);
}

// Forward transform continued to z = i chi: int Omega_d f Lambda_d(i r chi) dr.
// Only meaningful when f decays faster than exp(-chi r).
inline QuadratureReport forward_ft_imag(const RadialFunction& f, double d, double chi,
                                        const TransformOptions& opt = {}) {
    if (!(chi >= 0.0)) throw DomainError("forward_ft_imag: chi must be non-negative");
    auto g = [&](double r) {
        const double v = f(r);
        return v == 0.0 ? 0.0 : omega(d, r) * v * kernel_lambda_imag(d, chi * r);
    };
    const QuadratureOptions panel{0.0, 1e-13, 1000};
    QuadratureReport out;
    double left = 0.0;
    std::vector<double> bps = f.breakpoints;
    std::sort(bps.begin(), bps.end());
    for (double b : bps) {
        if (b <= left || b >= f.support) continue;
        const QuadratureReport piece = integrate(g, left, b, panel);
        out.value += piece.value;
        out.est_error += piece.est_error;
        out.panels_used += piece.panels_used;
        left = b;
    }
    if (std::isfinite(f.support)) {
        const QuadratureReport piece = integrate(g, left, f.support, panel);
        out.value += piece.value;
        out.est_error += piece.est_error;
        out.panels_used += piece.panels_used;
        return out;
    }
    TailOptions tail;
    tail.rel_tol = opt.rel_tol * 1e-2;
    tail.max_panels = 400;
    tail.panel = panel;
    const QuadratureReport rest = integrate_to_infinity(g, left, tail);
    out.value += rest.value;
    out.est_error += rest.est_error;
    out.panels_used += rest.panels_used;
    return out;
}

// Inverse transform at radius r > 0. The caller strips any uncollided part so
// that fbar decays; the check below rejects transforms whose integrand envelope
// z^{(d-1)/2} |fbar(z)| does not shrink.
inline QuadratureReport inverse_ft(const std::function<double(double)>& fbar, double d, double r,
                                   const TransformOptions& opt = {}) {
    if (!(r > 0.0)) throw DomainError("inverse_ft: r must be positive");
    if (!(d >= 1.0)) throw DomainError("inverse_ft: d must be at least 1");
    auto envelope = [&](double z) {
        double m = 0.0;
        for (double f : {1.0, 1.07, 1.13, 1.21}) m = std::max(m, std::abs(fbar(z * f)));
        return std::pow(z, 0.5 * (d - 1.0)) * m;
    };
    const double near = envelope(1e3), far = envelope(1e4);
    if (!(far < near || far < 1e-14)) {
        std::ostringstream msg;
        msg << "inverse_ft: transform decays too slowly for inversion (envelope " << near << " at z=1e3, " << far
            << " at z=1e4); strip the uncollided term first";
        throw NumericError(msg.str());
    }
    const double norm = std::pow(2.0 * std::numbers::pi, -d);
    auto w = [&](double z) { return norm * omega(d, z) * fbar(z); };
    return transform_detail::hankel_integral(w, d, r, Decay::algebraic, std::numeric_limits<double>::infinity(), {},
                                             opt);
}

// Inverse transform of 1/(1 + (z nu)^2): the point-source diffusion mode.
inline double diffusion_mode_kernel(double d, double nu, double r) {
    if (!(nu > 0.0)) throw DomainError("diffusion_mode_kernel: nu must be positive");
    if (!(r >= 0.0)) throw DomainError("diffusion_mode_kernel: r must be non-negative");
    if (r == 0.0) {
        if (d >= 2.0) throw DivergenceError("diffusion_mode_kernel: divergent at r = 0 for d >= 2");
        // d in [1, 2): r^{1-d/2} K_{(d-2)/2}(r/nu) tends to Gamma(1-d/2) 2^{-d/2} nu^{1-d/2}.
        return std::pow(2.0 * std::numbers::pi, -0.5 * d) * std::pow(nu, -d) * std::tgamma(1.0 - 0.5 * d) *
               std::pow(2.0, -0.5 * d);
    }
    const double x = r / nu;
    if (d == 3.0) return std::exp(-x) / (4.0 * std::numbers::pi * r * nu * nu);
    if (d == 1.0) return std::exp(-x) / (2.0 * nu);
    const double order = std::abs(0.5 * d - 1.0);
    const double log_pre = -0.5 * d * std::log(2.0 * std::numbers::pi) + (1.0 - 0.5 * d) * std::log(r) +
                           (-0.5 * d - 1.0) * std::log(nu);
    return std::exp(log_pre - x) * sf::bessel_k_scaled(order, x);
}

// Inverse transform of (1 + (z nu)^2)^{-alpha}; alpha = 1 is the diffusion mode.
inline double matern_kernel(double d, double nu, double alpha, double r) {
    if (!(nu > 0.0) || !(alpha > 0.0)) throw DomainError("matern_kernel: nu and alpha must be positive");
    if (!(r > 0.0)) throw DomainError("matern_kernel: r must be positive");
    const double x = r / nu, order = alpha - 0.5 * d;
    const double log_pre = (1.0 - alpha) * std::log(2.0) + order * std::log(x) - 0.5 * d * std::log(2.0 * std::numbers::pi) -
                           d * std::log(nu) - std::lgamma(alpha);
    return std::exp(log_pre - x) * sf::bessel_k_scaled(std::abs(order), x);
}

// Taylor coefficients a_0..a_{count-1} of fbar(z) = sum_j a_j z^{2j} about z = 0.
//
// fbar is sampled as a function of u = z^2 on Chebyshev nodes over [0, H] for a
// geometric ladder of H; each interpolant gives derivatives at u = 0, and the
// ladder member whose estimates agree best with its neighbour is returned.
struct SeriesEstimate {
    std::vector<double> coefficients;
    double spread = 0.0;  // disagreement between neighbouring ladder members (relative)
    double window = 0.0;  // chosen H
};

inline SeriesEstimate even_series_estimate_at(const std::function<double(double)>& fbar, int count, int degree,
                                              double h_start, int rungs) {
    if (count < 1 || count > degree) throw DomainError("even_series_coefficients: bad coefficient count");
    const int n = degree + 1;
    auto fit = [&](double h) {
        std::vector<double> vals(n), cheb(n, 0.0);
        for (int i = 0; i < n; ++i) {
            const double theta = std::numbers::pi * (i + 0.5) / n;
            const double u = 0.5 * h * (1.0 + std::cos(theta));
            vals[i] = fbar(std::sqrt(u));
        }
        for (int k = 0; k < n; ++k) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += vals[i] * std::cos(k * std::numbers::pi * (i + 0.5) / n);
            cheb[k] = (k == 0 ? 1.0 : 2.0) * s / n;
        }
        // d^j/dt^j T_k at t = -1 is (-1)^{k+j} prod_{l<j} (k^2 - l^2)/(2l+1).
        std::vector<double> coeff(count, 0.0);
        double scale = 1.0, fact = 1.0;
        for (int j = 0; j < count; ++j) {
            double deriv = 0.0;
            for (int k = j; k < n; ++k) {
                double prod = 1.0;
                for (int l = 0; l < j; ++l) prod *= (static_cast<double>(k) * k - static_cast<double>(l) * l) / (2.0 * l + 1.0);
                deriv += cheb[k] * (((k + j) % 2 == 0) ? prod : -prod);
            }
            if (j > 0) {
                scale *= 2.0 / h;
                fact *= j;
            }
            coeff[j] = deriv * scale / fact;
        }
        return coeff;
    };
    std::vector<std::vector<double>> ladder;
    std::vector<double> windows;
    for (int j = 0; j < rungs; ++j) {
        const double h = h_start * std::pow(0.5, j);
        ladder.push_back(fit(h));
        windows.push_back(h);
    }
    // Per-rung disagreement with the next smaller window, measured on the highest coefficient.
    SeriesEstimate best;
    best.spread = std::numeric_limits<double>::infinity();
    for (int j = 0; j + 1 < rungs; ++j) {
        double spread = 0.0;
        for (int c = 0; c < count; ++c) {
            const double a = ladder[j][c], b = ladder[j + 1][c];
            const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
            spread = std::max(spread, std::abs(a - b) / scale);
        }
        if (spread < best.spread) {
            best.spread = spread;
            best.coefficients = ladder[j + 1];
            best.window = windows[j + 1];
        }
    }
    return best;
}

// Tries several interpolation degrees: low degrees resist noise in fbar, high
// degrees resolve transforms with nearby singularities.
inline SeriesEstimate even_series_estimate(const std::function<double(double)>& fbar, int count, double h_start = 4.0,
                                           int rungs = 14) {
    SeriesEstimate best;
    best.spread = std::numeric_limits<double>::infinity();
    for (int degree : {8, 12, 16, 20}) {
        if (degree < count + 2) continue;
        SeriesEstimate e = even_series_estimate_at(fbar, count, degree, h_start, rungs);
        if (e.spread < best.spread) best = std::move(e);
        if (best.spread < 1e-12) break;
    }
    return best;
}

inline std::vector<double> even_series_coefficients(const std::function<double(double)>& fbar, int count) {
    return even_series_estimate(fbar, count).coefficients;
}

// int_0^inf r^m Omega_d(r) f(r) dr from the Taylor coefficients of fbar at z = 0.
inline double even_moment(const std::function<double(double)>& fbar, double d, int m, double max_spread = 1e-6) {
    if (m < 0 || m % 2 != 0) throw DomainError("even_moment: m must be a non-negative even integer");
    const int j = m / 2;
    const SeriesEstimate est = even_series_estimate(fbar, j + 1);
    if (!(est.spread <= max_spread)) {
        std::ostringstream msg;
        msg << "even_moment: derivative fit is ill-conditioned (ladder spread " << est.spread << " for m=" << m << ")";
        throw NumericError(msg.str());
    }
    const double factor = std::sqrt(std::numbers::pi) * std::tgamma(0.5 * (d + m)) /
                          (std::tgamma(0.5 * d) * std::tgamma(0.5 * (m + 1.0)));
    double mfact = 1.0;
    for (int i = 2; i <= m; ++i) mfact *= i;
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    return factor * sign * mfact * est.coefficients[j];
}

}  // namespace glbe
