#pragma once
// Closed-form Green's functions, moment formulas and the classical 3D
// benchmark.  Queries without a known closed form return std::nullopt.

#include <cmath>
#include <numbers>
#include <optional>

#include "glbe/errors.hpp"
#include "glbe/freepath.hpp"
#include "glbe/quadrature.hpp"
#include "glbe/specfun.hpp"
#include "glbe/transform.hpp"

namespace glbe {

enum class Quantity { collision, flux };

inline std::string_view quantity_name(Quantity q) { return q == Quantity::collision ? "collision" : "flux"; }

// A collision order n, or the total over all orders when `order` is empty.
struct SolutionKey {
    Quantity quantity = Quantity::collision;
    std::optional<int> order;

    static SolutionKey collision_nth(int n) { return {Quantity::collision, n}; }
    static SolutionKey collision_total() { return {Quantity::collision, std::nullopt}; }
    static SolutionKey flux_nth(int n) { return {Quantity::flux, n}; }
    static SolutionKey flux_total() { return {Quantity::flux, std::nullopt}; }

    bool is_total() const { return !order.has_value(); }
};

namespace analytic_detail {

constexpr double pi = std::numbers::pi;

inline void check_key(const SolutionKey& key) {
    if (!key.order) return;
    const int lowest = key.quantity == Quantity::collision ? 1 : 0;
    if (*key.order < lowest) {
        throw DomainError(key.quantity == Quantity::collision ? "collision order n must be at least 1"
                                                              : "flux order n must be at least 0");
    }
}

inline void check_radius(double r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("radius r must be positive and finite");
}

inline double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// log K_nu(x) for x > 0, any real nu.
inline double log_bessel_k(double nu, double x) { return std::log(sf::bessel_k_scaled(std::abs(nu), x)) - x; }

inline bool near(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

}  // namespace analytic_detail

// ---------------------------------------------------------------------------
// Fourier-domain solutions

// Transform of the requested quantity, including its uncollided part.
inline double solution_transform(const TransportProblem& p, const SolutionKey& key, double z) {
    analytic_detail::check_key(key);
    const double c = p.c(), zeta = propagator(p, z);
    if (key.quantity == Quantity::collision) {
        if (key.order) return std::pow(c, *key.order - 1) * std::pow(zeta, *key.order);
        return zeta / (1.0 - c * zeta);
    }
    const double x = stretched_propagator(p, z);
    if (key.order) return std::pow(c, *key.order) * std::pow(zeta, *key.order) * x;
    return x / (1.0 - c * zeta);
}

// Total transform with the uncollided part (n = 1 collisions, n = 0 flux) removed.
inline double scattered_transform(const TransportProblem& p, Quantity q, double z) {
    const double c = p.c(), zeta = propagator(p, z);
    const double head = q == Quantity::collision ? zeta : stretched_propagator(p, z);
    return head * c * zeta / (1.0 - c * zeta);
}

// p(r)/Omega_d(r) for collisions, E(r)/Omega_d(r) for flux.
inline double uncollided_density(const TransportProblem& p, Quantity q, double r) {
    analytic_detail::check_radius(r);
    const double shell = omega(p.d(), r);
    if (q == Quantity::collision) return p.model().pdf(r) / shell;
    return p.model().extinction(r) / shell;
}

// Density obtained by numerically inverting the transform; the uncollided term
// is added analytically.
inline QuadratureReport numerical_density(const TransportProblem& p, const SolutionKey& key, double r,
                                          const TransformOptions& opt = {}) {
    analytic_detail::check_key(key);
    analytic_detail::check_radius(r);
    const bool first = key.order && *key.order == (key.quantity == Quantity::collision ? 1 : 0);
    if (first) return {uncollided_density(p, key.quantity, r), 0.0, 0, 0};
    if (key.order) {
        return inverse_ft([&](double z) { return solution_transform(p, key, z); }, p.d(), r, opt);
    }
    QuadratureReport out =
        inverse_ft([&](double z) { return scattered_transform(p, key.quantity, z); }, p.d(), r, opt);
    out.value += uncollided_density(p, key.quantity, r);
    return out;
}

// ---------------------------------------------------------------------------
// Exponential 3D benchmark

struct CaseologyConstants {
    double c = 0.0;
    double nu0 = 0.0;
    double n0_plus = 0.0;

    double lambda(double nu) const { return 1.0 - c * nu * std::atanh(nu); }
    double n_nu(double nu) const {
        const double l = lambda(nu);
        return nu * (l * l + 0.25 * std::numbers::pi * std::numbers::pi * c * c * nu * nu);
    }
};

// nu0 > 1 solving 1 = c nu0 artanh(1/nu0), and the discrete normalization N0+.
inline CaseologyConstants caseology_constants(double c) {
    if (!(c > 0.0 && c < 1.0)) throw DomainError("caseology_constants: c must lie in (0, 1)");
    auto g = [c](double chi) { return chi < 1e-4 ? 1.0 - c * (1.0 + chi * chi / 3.0 + chi * chi * chi * chi / 5.0)
                                                 : 1.0 - c * std::atanh(chi) / chi; };
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200 && hi - lo > 1e-17; ++i) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) > 0.0 ? lo : hi) = mid;
    }
    double chi = 0.5 * (lo + hi);
    for (int i = 0; i < 3; ++i) {
        // d/dchi of atanh(chi)/chi
        const double deriv = 1.0 / (chi * (1.0 - chi * chi)) - std::atanh(chi) / (chi * chi);
        const double step = g(chi) / (c * deriv);
        if (!std::isfinite(step) || std::abs(step) > hi - lo + 1e-15) break;
        chi += step;
    }
    CaseologyConstants out;
    out.c = c;
    out.nu0 = 1.0 / chi;
    const double nu0 = out.nu0;
    out.n0_plus = 0.5 * c * nu0 * nu0 * nu0 * (c / (nu0 * nu0 - 1.0) - 1.0 / (nu0 * nu0));
    return out;
}

// Scalar flux about a point source, exponential free paths in 3D, from the
// real-line integral over the continuous spectrum plus the discrete term.
inline double davison_scalar_flux(double c, double r) {
    analytic_detail::check_radius(r);
    const CaseologyConstants k = caseology_constants(c);
    const double pi = std::numbers::pi;
    // y = 1 + t, log((y+1)/(y-1)) = log((2+t)/t)
    auto integrand = [&](double t) {
        if (t <= 0.0) return 0.0;
        const double y = 1.0 + t;
        const double l = std::log1p(2.0 / t);
        const double a = 1.0 - c * l / (2.0 * y);
        return std::exp(-r * t) / (pi * pi * c * c / (4.0 * y * y) + a * a);
    };
    const QuadratureOptions near{1e-300, 1e-13, 4000};
    double cont = 0.0;
    // The log singularity at t = 0 is resolved by grading the first panels.
    double left = 0.0;
    for (double right : {1e-12, 1e-8, 1e-5, 1e-3, 0.05, 1.0}) {
        cont += integrate(integrand, left, right, near).value;
        left = right;
    }
    TailOptions tail;
    tail.scale = std::max(0.5, 1.0 / r);
    tail.rel_tol = 1e-15;
    tail.abs_tol = 1e-300;
    cont += integrate_to_infinity(integrand, 1.0, tail).value;
    const double discrete = std::exp(-r / k.nu0) / (k.nu0 * k.n0_plus);
    return (discrete + std::exp(-r) * cont) / (4.0 * pi * r);
}

// Series form of the exponential flatland scalar flux, summed until the
// remaining terms drop below `tail` relative to the sum.
inline double liemert_flatland_flux(double c, double r, double tail = 1e-15) {
    analytic_detail::check_radius(r);
    const double pi = std::numbers::pi;
    // u_n = r^{n-1/2} K_{n-1/2}(r) / (2n-1)!!, with (-1)!! = 1
    const double half = std::sqrt(pi / (2.0 * r)) * std::exp(-r);
    double u_prev = half / std::sqrt(r);  // n = 0
    double u = std::sqrt(r) * half;       // n = 1
    const double c2 = c * c;
    double weight = c2, sum = 0.0;
    for (int n = 1; n < 1000000; ++n) {
        const double term = weight * u;
        sum += term;
        if (std::abs(term) <= tail * std::abs(sum) && n > 3) break;
        const double next = (r * r * u_prev / (2.0 * n - 1.0) + (2.0 * n - 1.0) * u) / (2.0 * n + 1.0);
        u_prev = u;
        u = next;
        weight *= c2;
    }
    sum *= std::sqrt(2.0 / pi);
    return std::exp(-r) / (2.0 * pi * r) + c * sf::bessel_k(0.0, std::sqrt(1.0 - c2) * r) / (2.0 * pi) +
           sum / (2.0 * pi);
}

// ---------------------------------------------------------------------------
// Closed-form densities

inline std::optional<double> nth_collision_density(const TransportProblem& p, int n, double r) {
    using namespace analytic_detail;
    if (n < 1) throw DomainError("nth_collision_density: n must be at least 1");
    check_radius(r);
    const FreePathModel& m = p.model();
    const double c = p.c(), d = p.d(), k = m.parameter();
    const double cn = std::pow(c, n - 1);

    if (n == 1) {
        if (!m.has_density()) return std::nullopt;
        return m.pdf_over_power(r, d - 1.0) / omega(d, 1.0);
    }
    if (m.is_exponential()) {
        if (d == 1.0) {
            const double log_v = (0.5 - n) * std::log(2.0) + (n - 0.5) * std::log(r) + log_bessel_k(0.5 - n, r) -
                                 0.5 * std::log(pi) - std::lgamma(n);
            return cn * std::exp(log_v);
        }
        if (d == 2.0) {
            const double log_v = (-0.5 * n - 1.0) * std::log(2.0) + std::log(n) + (0.5 * n - 1.0) * std::log(r) +
                                 log_bessel_k(1.0 - 0.5 * n, r) - std::log(pi) - std::lgamma(0.5 * n + 1.0);
            return cn * std::exp(log_v);
        }
        if (d == 4.0 && n == 2) {
            return -c * (r * r * sf::exp_integral_ei(-r) + std::exp(-r) * (r - 1.0)) / (pi * pi * r * r);
        }
        return std::nullopt;
    }
    switch (m.family()) {
        case Family::gamma:
            if (k == 2.0) {
                if (d == 1.0 && n == 2) return c * std::exp(-2.0 * r) * (8.0 * r * r * r + 6.0 * r + 3.0) / 12.0;
                if (d == 1.0 && n == 3) {
                    return c * c * std::exp(-2.0 * r) *
                           (2.0 * r * (r * (8.0 * r * r * r + 30.0 * r + 45.0) + 45.0) + 45.0) / 240.0;
                }
                if (d == 2.0) {
                    const double a = 1.5 * n;
                    return cn * std::exp(std::log(2.0) + (a - 1.0) * std::log(r) + log_bessel_k(1.0 - a, 2.0 * r) -
                                         std::log(pi) - std::lgamma(a));
                }
                if (d == 3.0) {
                    return cn * std::exp(std::log(2.0) + (n - 1.5) * std::log(r) + log_bessel_k(1.5 - n, 2.0 * r) -
                                         1.5 * std::log(pi) - std::lgamma(n));
                }
            }
            if (k == 0.5 && d == 1.0) {
                if (n == 2) return c * (2.0 * sf::bessel_k(0.0, 0.5 * r) + pi * std::exp(-0.5 * r)) / (8.0 * pi);
                if (n == 4) {
                    return c * c * c * (pi * std::exp(-0.5 * r) * (r + 6.0) + 8.0 * r * sf::bessel_k(1.0, 0.5 * r)) /
                           (64.0 * pi);
                }
            }
            return std::nullopt;
        case Family::chi:
            if (k == d) {
                const double a2 = m.chi_rate() * m.chi_rate();
                return cn * std::pow(a2 / (pi * n), 0.5 * d) * std::exp(-a2 * r * r / n);
            }
            if (k == 3.0 && d == 1.0 && n == 2) {
                const double r2 = r * r;
                return c * std::exp(-2.0 * r2 / pi) * (16.0 * r2 * r2 - 8.0 * pi * r2 + 3.0 * pi * pi) /
                       (2.0 * std::numbers::sqrt2 * pi * pi * pi);
            }
            if (k == 4.0 && d == 2.0 && n == 2) {
                const double r2 = r * r;
                return 9.0 * c * std::exp(-9.0 * pi * r2 / 32.0) * (81.0 * pi * pi * r2 * r2 + 2048.0) / 131072.0;
            }
            return std::nullopt;
        case Family::pearson:
            if (d == 2.0 && n == 2) return r < 2.0 ? c / (pi * pi * r * std::sqrt(4.0 - r * r)) : 0.0;
            if (d == 2.0 && n == 3) {
                if (r >= 3.0) return 0.0;
                if (r == 1.0) throw DivergenceError("Pearson flatland C(r|3) has a logarithmic singularity at r = 1");
                const double r2 = r * r;
                // w peaks at exactly 1 when r = 1; rounding can push it just past the branch point.
                const double w = std::min(1.0 - 1e-16, r2 * (9.0 - r2) * (9.0 - r2) / ((r2 + 3.0) * (r2 + 3.0) * (r2 + 3.0)));
                return c * c * std::sqrt(3.0) * sf::hyp2f1(1.0 / 3.0, 2.0 / 3.0, 1.0, w) / (pi * pi * (r2 + 3.0));
            }
            if (d == 3.0 && n == 2) {
                if (r == 2.0) throw BoundaryValueError("Pearson 3D C(r|2) jumps at r = 2");
                return c * (sgn(2.0 - r) + 1.0) / (16.0 * pi * r);
            }
            if (d == 3.0 && n == 3) {
                return c * c * (std::abs(r - 3.0) - 3.0 * std::abs(r - 1.0) + 2.0 * r) / (32.0 * pi * r);
            }
            if (d == 3.0 && n == 4) {
                return c * c * c *
                       (-(r - 4.0) * std::abs(r - 4.0) + 4.0 * (r - 2.0) * std::abs(r - 2.0) + (8.0 - 3.0 * r) * r) /
                       (128.0 * pi * r);
            }
            return std::nullopt;
        case Family::bessel_k:
            if (d == k) return cn * matern_kernel(d, 1.0 / m.bessel_k_mean(), n, r);
            return std::nullopt;
        default: return std::nullopt;
    }
}

inline std::optional<double> total_collision_density(const TransportProblem& p, double r);

inline std::optional<double> nth_scalar_flux(const TransportProblem& p, int n, double r) {
    using namespace analytic_detail;
    if (n < 0) throw DomainError("nth_scalar_flux: n must be non-negative");
    check_radius(r);
    const FreePathModel& m = p.model();
    const double c = p.c(), d = p.d(), k = m.parameter();
    if (n == 0) return m.extinction(r) / omega(d, r);
    // With exponential paths the extinction equals the density, so phi(r|n) = C(r|n+1).
    if (m.is_exponential()) return nth_collision_density(p, n + 1, r);
    if (m.family() == Family::gamma && k == 2.0 && d == 2.0) {
        // phibar(z|n) = (c^n / 2) [(1 + z^2/4)^{-(3n+1)/2} + (1 + z^2/4)^{-(3n+3)/2}]
        return 0.5 * std::pow(c, n) *
               (matern_kernel(2.0, 0.5, 0.5 * (3.0 * n + 1.0), r) + matern_kernel(2.0, 0.5, 0.5 * (3.0 * n + 3.0), r));
    }
    if (m.family() == Family::pearson && d == 1.0 && n >= 2 && n <= 5) {
        const int first_jump = n % 2 == 0 ? 1 : 2;
        for (int j = first_jump; j <= n + 1; j += 2) {
            if (r == j) throw BoundaryValueError("Pearson rod phi(r|n) jumps at r = " + std::to_string(j));
        }
        const double cn = std::pow(c, n);
        switch (n) {
            case 2: return cn * (sgn(1.0 - r) + sgn(3.0 - r) + 2.0) / 16.0;
            case 3: return cn * (2.0 * sgn(2.0 - r) + sgn(4.0 - r) + 3.0) / 32.0;
            case 4: return cn * (2.0 * sgn(1.0 - r) + 3.0 * sgn(3.0 - r) + sgn(5.0 - r) + 6.0) / 64.0;
            default: return cn * (5.0 * sgn(2.0 - r) + 4.0 * sgn(4.0 - r) + sgn(6.0 - r) + 10.0) / 128.0;
        }
    }
    return std::nullopt;
}

inline std::optional<double> total_collision_density(const TransportProblem& p, double r) {
    using namespace analytic_detail;
    check_radius(r);
    const FreePathModel& m = p.model();
    const double c = p.c(), d = p.d(), k = m.parameter();
    if (m.is_exponential()) {
        if (d == 1.0) {
            const double s = std::sqrt(1.0 - c);
            return std::exp(-r * s) / (2.0 * s);
        }
        if (d == 2.0) return numerical_density(p, SolutionKey::collision_total(), r).value;
        if (d == 3.0) return davison_scalar_flux(c, r);
        if (d == 4.0 && c == 0.5) return std::exp(-r) * (1.0 + r) / (2.0 * pi * pi * r * r * r);
        return std::nullopt;
    }
    if (m.family() == Family::gamma && k == 2.0) {
        if (d == 3.0) return std::exp(-2.0 * std::sqrt(1.0 - c) * r) / (pi * r);
        if (d == 1.0) {
            double sum = 0.0;
            for (double sign : {-1.0, 1.0}) {
                const double chi = std::numbers::sqrt2 * std::sqrt(2.0 + c + sign * std::sqrt(c * (c + 8.0)));
                const double chi2 = chi * chi;
                sum += -(chi2 * chi2 - 16.0) * std::exp(-r * chi) / (2.0 * c * chi * (chi2 + 12.0));
            }
            return sum;
        }
    }
    if (m.family() == Family::bessel_k && d == k) {
        return diffusion_mode_kernel(d, 1.0 / (m.bessel_k_mean() * std::sqrt(1.0 - c)), r) / (1.0 - c);
    }
    return std::nullopt;
}

inline std::optional<double> total_scalar_flux(const TransportProblem& p, double r) {
    analytic_detail::check_radius(r);
    if (p.model().is_exponential()) return total_collision_density(p, r);
    return std::nullopt;
}

// Dispatch on a SolutionKey.
inline std::optional<double> exact_density(const TransportProblem& p, const SolutionKey& key, double r) {
    analytic_detail::check_key(key);
    if (key.quantity == Quantity::collision) {
        return key.order ? nth_collision_density(p, *key.order, r) : total_collision_density(p, r);
    }
    return key.order ? nth_scalar_flux(p, *key.order, r) : total_scalar_flux(p, r);
}

// ---------------------------------------------------------------------------
// Spatial moments  int_0^inf r^m Omega_d(r) f(r) dr

namespace analytic_detail {

// Li_{-s}(x) = sum_{j>=1} j^s x^j for integer s >= 0, |x| < 1.
inline double polylog_negative(int s, double x) {
    double sum = 0.0, xj = 1.0;
    for (int j = 1; j < 10000000; ++j) {
        xj *= x;
        const double term = std::pow(static_cast<double>(j), s) * xj;
        sum += term;
        if (term < 1e-17 * sum && j > s) break;
    }
    return sum;
}

inline std::optional<double> exponential_collision_moment(double d, double c, std::optional<int> order, int m) {
    const double md = m;
    if (order) {
        const double n = *order, cn = std::pow(c, n - 1.0);
        if (d == 1.0) {
            return std::exp(md * std::log(2.0) + std::lgamma(0.5 * (md + 1.0)) + std::lgamma(0.5 * md + n) -
                            0.5 * std::log(pi) - std::lgamma(n)) * cn;
        }
        if (d == 2.0) {
            return std::exp(md * std::log(2.0) + std::lgamma(0.5 * md + 1.0) + std::lgamma(0.5 * (md + n)) -
                            std::lgamma(0.5 * n)) * cn;
        }
        switch (m) {
            case 0: return cn;
            case 2: return 2.0 * cn * n;
            case 4: return 4.0 * n * cn * ((d + 2.0) * n + 5.0 * d - 2.0) / d;
            case 6:
                return 8.0 * n * cn *
                       (d * d * (n * (n + 15.0) + 74.0) + 6.0 * d * (n - 1.0) * (n + 10.0) + 8.0 * (n - 2.0) * (n - 1.0)) /
                       (d * d);
            default: return std::nullopt;
        }
    }
    if (d == 1.0) return std::pow(1.0 - c, -0.5 * md - 1.0) * std::tgamma(md + 1.0);
    if (d == 2.0) {
        const double hyp = sf::hyp_pfq({-0.5, -0.5 * md}, {0.5}, c * c);
        return std::pow(1.0 - c * c, -0.5 * md - 1.0) *
               (std::tgamma(md + 1.0) * hyp + c * std::pow(2.0, md) * std::pow(std::tgamma(0.5 * md + 1.0), 2));
    }
    const double cm1 = c - 1.0;
    switch (m) {
        case 0: return 1.0 / (1.0 - c);
        case 2: return 2.0 / (cm1 * cm1);
        case 4: return 8.0 * (2.0 * c * (d - 1.0) - 3.0 * d) / (cm1 * cm1 * cm1 * d);
        case 6:
            return 48.0 * (2.0 * c * c * (d - 1.0) * (5.0 * d - 4.0) - 24.0 * c * (d - 1.0) * d + 15.0 * d * d) /
                   (cm1 * cm1 * cm1 * cm1 * d * d);
        default: return std::nullopt;
    }
}

}  // namespace analytic_detail

inline std::optional<double> exact_moment(const TransportProblem& p, const SolutionKey& key, int m) {
    using namespace analytic_detail;
    check_key(key);
    if (m < 0 || m % 2 != 0) throw DomainError("exact_moment: m must be a non-negative even integer");
    const FreePathModel& model = p.model();
    const double c = p.c(), d = p.d(), k = model.parameter();
    const double cm1 = c - 1.0;

    if (model.is_exponential()) {
        // Exponential flux moments are the collision moments one order up.
        std::optional<int> order = key.order;
        if (key.quantity == Quantity::flux && order) order = *order + 1;
        return exponential_collision_moment(d, c, order, m);
    }

    if (key.quantity == Quantity::flux && m >= 2 && !model.has_mean_square_extinction()) {
        throw DomainError("exact_moment: flux moments need a finite mean square extinction (beta-prime k > 3)");
    }

    // The first two even moments depend only on <s^2> and the extinction moment.
    if (m <= 2) {
        const double s2 = model.mean_square();
        if (key.quantity == Quantity::collision) {
            if (key.order) {
                const double n = *key.order, cn = std::pow(c, n - 1.0);
                return m == 0 ? cn : n * cn * s2;
            }
            return m == 0 ? 1.0 / (1.0 - c) : s2 / (cm1 * cm1);
        }
        if (m == 0) return key.order ? std::pow(c, *key.order) : 1.0 / (1.0 - c);
        const double e2 = model.mean_square_extinction();
        if (key.order) return std::pow(c, *key.order) * (*key.order * s2 + e2);
        return e2 / (1.0 - c) + c * s2 / (cm1 * cm1);
    }

    const bool collision = key.quantity == Quantity::collision;
    switch (model.family()) {
        case Family::gamma:
            if (!collision || m != 4) return std::nullopt;
            if (key.order) {
                const double n = *key.order;
                return (k + 1.0) * n * std::pow(c, n - 1.0) *
                       (d * (k * (k * n + n + 4.0) + 6.0) + 2.0 * k * (k + 1.0) * (n - 1.0)) / (d * k * k * k);
            }
            return -(k + 1.0) * (d * (c * ((k - 3.0) * k - 6.0) + (k + 2.0) * (k + 3.0)) + 4.0 * c * k * (k + 1.0)) /
                   (cm1 * cm1 * cm1 * d * k * k * k);
        case Family::chi: {
            if (k == 1.0 && d == 1.0 && collision) {
                const double base = std::pow(pi, 0.5 * (m - 1.0)) * std::tgamma(0.5 * (m + 1.0));
                if (key.order) return base * std::pow(c, *key.order - 1.0) * std::pow(*key.order, 0.5 * m);
                return base * polylog_negative(m / 2, c) / c;
            }
            if (m != 4) return std::nullopt;
            const double g = std::exp(2.0 * (std::lgamma(0.5 * k) - std::lgamma(0.5 * (k + 1.0))));
            const double g2 = g * g;
            if (collision) {
                if (key.order) {
                    const double n = *key.order;
                    return k * n * std::pow(c, n - 1.0) * g2 * (d * (k * n + 2.0) + 2.0 * k * (n - 1.0)) / (4.0 * d);
                }
                return -k * g2 * (d * (c * (k - 2.0) + k + 2.0) + 4.0 * c * k) / (4.0 * cm1 * cm1 * cm1 * d);
            }
            if (!key.order) return std::nullopt;
            const double n = *key.order;
            return std::pow(c, n) * g2 *
                   (15.0 * (d + 2.0) * k * k * n * n + 10.0 * k * n * (d * (k + 4.0) - k + 2.0) +
                    3.0 * d * (k + 1.0) * (k + 3.0)) /
                   (60.0 * d);
        }
        case Family::pearson:
            if (collision) {
                if (key.order) {
                    const double n = *key.order, cn = std::pow(c, n - 1.0);
                    if (m == 4) return n * cn * ((d + 2.0) * n - 2.0) / d;
                    if (m == 6) return n * cn * ((d + 4.0) * n * ((d + 2.0) * n - 6.0) + 16.0) / (d * d);
                    return std::nullopt;
                }
                if (m == 4) return -(c * (d + 4.0) + d) / (cm1 * cm1 * cm1 * d);
                if (m == 6) {
                    return (c * c * (d * (d + 12.0) + 48.0) + 4.0 * c * d * (d + 6.0) + d * d) /
                           (cm1 * cm1 * cm1 * cm1 * d * d);
                }
                return std::nullopt;
            }
            if (key.order && m == 4) {
                const double n = *key.order;
                return std::pow(c, n) * (15.0 * (d + 2.0) * n * n + 10.0 * (d - 1.0) * n + 3.0 * d) / (15.0 * d);
            }
            return std::nullopt;
        default: return std::nullopt;
    }
}

}  // namespace glbe
