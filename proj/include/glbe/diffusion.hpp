#pragma once
// Diffusion approximations to the point-source Green's function: classical P1,
// Grosjean's uncollided-plus-diffusion form, and the rigorous asymptotic form
// built from the discrete spectrum of the characteristic equation
//   1 - c zetabar_d(i chi) = 0,  nu = 1/chi.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "glbe/analytic.hpp"
#include "glbe/errors.hpp"
#include "glbe/freepath.hpp"
#include "glbe/transform.hpp"

namespace glbe {

enum class Flavor { p1, grosjean, rigorous };

inline std::string_view flavor_name(Flavor f) {
    switch (f) {
        case Flavor::p1: return "p1";
        case Flavor::grosjean: return "grosjean";
        case Flavor::rigorous: return "rigorous";
    }
    return {};
}

struct DiffusionMode {
    double nu = 0.0;
    double weight = 0.0;
};

class DiffusionApproximation {
public:
    DiffusionApproximation(TransportProblem problem, Quantity quantity, Flavor flavor, bool include_uncollided,
                           std::vector<DiffusionMode> modes)
        : problem_(problem),
          quantity_(quantity),
          flavor_(flavor),
          include_uncollided_(include_uncollided),
          modes_(std::move(modes)) {
        for (const auto& m : modes_) {
            if (!(m.nu > 0.0) || !std::isfinite(m.nu)) throw DomainError("diffusion mode length must be positive");
        }
        if (flavor_ == Flavor::grosjean && !include_uncollided_) {
            throw DomainError("Grosjean approximation must carry its uncollided term");
        }
        if (flavor_ == Flavor::p1 && modes_.size() != 1) throw DomainError("P1 approximation has exactly one mode");
    }

    const TransportProblem& problem() const { return problem_; }
    Quantity quantity() const { return quantity_; }
    Flavor flavor() const { return flavor_; }
    bool include_uncollided() const { return include_uncollided_; }
    const std::vector<DiffusionMode>& modes() const { return modes_; }
    double d() const { return problem_.d(); }

    // Rigorous approximations with no discrete eigenvalue.
    bool breakdown() const { return flavor_ == Flavor::rigorous && modes_.empty(); }

    // Notes such as disagreements between a printed closed form and the
    // moment-matched value actually used.
    const std::vector<std::string>& warnings() const { return warnings_; }
    void add_warning(std::string w) { warnings_.push_back(std::move(w)); }

    // Sum of the diffusion modes alone.
    double diffusive_part(double r) const {
        double sum = 0.0;
        for (const auto& m : modes_) {
            if (m.weight != 0.0) sum += m.weight * diffusion_mode_kernel(problem_.d(), m.nu, r);
        }
        return sum;
    }

    // The uncollided term, when present (throws UnsupportedQuery for the
    // Pearson collision density, a shell delta).
    double uncollided(double r) const {
        return include_uncollided_ ? uncollided_density(problem_, quantity_, r) : 0.0;
    }

    double evaluate(double r) const {
        if (breakdown()) throw StateError("rigorous diffusion approximation broke down: no discrete eigenvalue");
        return uncollided(r) + diffusive_part(r);
    }
    double operator()(double r) const { return evaluate(r); }

    // int r^m Omega_d f dr in closed form.  With an uncollided term only m = 0
    // and m = 2 are available, since they need just <s^2> or the extinction moment.
    double moment(int m) const {
        if (m < 0 || m % 2 != 0) throw DomainError("moment: m must be a non-negative even integer");
        const double d = problem_.d();
        const double factor = std::sqrt(std::numbers::pi) * std::tgamma(0.5 * (d + m)) /
                              (std::tgamma(0.5 * d) * std::tgamma(0.5 * (m + 1.0)));
        double mfact = 1.0;
        for (int i = 2; i <= m; ++i) mfact *= i;
        double sum = 0.0;
        for (const auto& mode : modes_) sum += mode.weight * factor * mfact * std::pow(mode.nu, m);
        if (include_uncollided_) {
            if (m > 2) throw UnsupportedQuery("moment: uncollided moments beyond m = 2 are not tabulated");
            const FreePathModel& model = problem_.model();
            if (m == 0) {
                sum += 1.0;
            } else {
                sum += quantity_ == Quantity::collision ? model.mean_square() : model.mean_square_extinction();
            }
        }
        return sum;
    }

private:
    TransportProblem problem_;
    Quantity quantity_;
    Flavor flavor_;
    bool include_uncollided_;
    std::vector<DiffusionMode> modes_;
    std::vector<std::string> warnings_;
};

namespace diffusion_detail {

inline void require_flux_moment(const TransportProblem& p, Quantity q) {
    if (q == Quantity::flux && !p.model().has_mean_square_extinction()) {
        throw DomainError("scalar-flux diffusion needs a finite mean square extinction, which diverges for " +
                          p.model().spec());
    }
}

// nu^2 for the one-mode approximations, from <s^2> and int E s^2 alone.
inline double moment_matched_length_squared(const TransportProblem& p, Quantity q, Flavor f) {
    const double c = p.c(), d = p.d(), s2 = p.model().mean_square();
    if (q == Quantity::collision) {
        return f == Flavor::p1 ? s2 / (2.0 * d * (1.0 - c)) : s2 * (2.0 - c) / (2.0 * d * (1.0 - c));
    }
    const double e2 = p.model().mean_square_extinction();
    return f == Flavor::p1 ? (e2 * (1.0 - c) + c * s2) / (2.0 * d * (1.0 - c)) : (e2 * (1.0 - c) + s2) / (2.0 * d * (1.0 - c));
}

// Per-family closed forms as they appear in the literature, kept verbatim so
// that any disagreement with the moment-matched value is visible.
inline std::optional<double> published_length_squared(const TransportProblem& p, Quantity q, Flavor f) {
    const FreePathModel& m = p.model();
    const double c = p.c(), d = p.d(), k = m.parameter();
    const bool collision = q == Quantity::collision, p1 = f == Flavor::p1;
    if (m.is_exponential()) {
        if (collision) return p1 ? 1.0 / (d * (1.0 - c)) : (2.0 - c) / ((1.0 - c) * d);
        if (p1) return 1.0 / (d * (1.0 - c));
        if (d == 3.0) return 1.0 / (3.0 + 3.0 / (c - 2.0));
        return std::nullopt;
    }
    switch (m.family()) {
        case Family::gamma:
            if (collision) return p1 ? (k + 2.0) / (2.0 * d * k - 2.0 * c * d * k) : (c - 2.0) * (k + 1.0) / (2.0 * (c - 1.0) * d * k);
            if (p1) return (-k - 1.0) * (2.0 * c * (k - 1.0) + k + 2.0) / (6.0 * (c - 1.0) * d * k * k);
            return (k + 1.0) * (c * (k + 2.0) - 4.0 * k - 2.0) / (6.0 * (c - 1.0) * d * k * k);
        case Family::chi: {
            const double g = std::exp(2.0 * (std::lgamma(0.5 * k) - std::lgamma(0.5 * (k + 1.0))));
            if (collision) return p1 ? k * g / (4.0 * d * (1.0 - c)) : (c - 2.0) * k * g / (4.0 * (c - 1.0) * d);
            if (p1) return (c * (2.0 * k - 1.0) + k + 1.0) * g / (12.0 * (1.0 - c) * d);
            return ((c - 4.0) * k + c - 1.0) * g / (12.0 * (c - 1.0) * d);
        }
        case Family::beta_prime:
            if (!collision) return std::nullopt;
            if (p1) return 1.0 / (2.0 * (1.0 - c) * d * (k - 2.0) / k);
            return 1.0 / (2.0 * (c - 1.0) * d * (k - 2.0) / ((c - 2.0) * k));
        case Family::pearson:
            if (collision) return p1 ? 1.0 / (2.0 * (1.0 - c) * d) : (2.0 - c) / (2.0 * (1.0 - c) * d);
            return p1 ? -(2.0 * c + 1.0) / (6.0 * (c - 1.0) * d) : (c - 4.0) / (6.0 * (c - 1.0) * d);
        default: return std::nullopt;
    }
}

inline DiffusionApproximation one_mode(const TransportProblem& p, Quantity q, Flavor f) {
    require_flux_moment(p, q);
    const double nu2 = moment_matched_length_squared(p, q, f);
    const double c = p.c();
    const double weight = f == Flavor::p1 ? 1.0 / (1.0 - c) : c / (1.0 - c);
    DiffusionApproximation out(p, q, f, f == Flavor::grosjean, {{std::sqrt(nu2), weight}});
    if (const auto printed = published_length_squared(p, q, f)) {
        if (std::abs(*printed - nu2) > 1e-10 * nu2) {
            std::ostringstream msg;
            msg.precision(12);
            msg << "published " << flavor_name(f) << " " << quantity_name(q) << " length nu^2 = " << *printed
                << " for " << p.model().spec() << " disagrees with the moment-matched value " << nu2
                << "; using the moment-matched value";
            out.add_warning(msg.str());
        }
    }
    return out;
}

}  // namespace diffusion_detail

// Classical P1: one mode matching the zeroth and second moments of the total.
inline DiffusionApproximation p1_approximation(const TransportProblem& p, Quantity q) {
    return diffusion_detail::one_mode(p, q, Flavor::p1);
}

// Exact uncollided term plus one mode of weight c/(1-c) matching the total's
// zeroth and second moments.
inline DiffusionApproximation grosjean_approximation(const TransportProblem& p, Quantity q) {
    return diffusion_detail::one_mode(p, q, Flavor::grosjean);
}

// ---------------------------------------------------------------------------
// Discrete spectrum

struct SpectrumOptions {
    double chi_max = 50.0;     // cap for entire or meromorphic transforms
    int grid_points = 600;     // geometric scan grid
    double residual_tol = 1e-12;
};

struct SpectrumReport {
    double chi_end = 0.0;          // last abscissa scanned
    double abscissa = 0.0;         // divergence abscissa of zetabar(i chi)
    bool continued = false;        // scanned past the abscissa on a meromorphic continuation
    int grid_points = 0;
    int brackets = 0;              // sign changes found
    int rejected_poles = 0;        // sign changes that were poles, not roots
    int iterations = 0;            // bisection plus secant steps, summed over roots
    bool abscissa_root = false;    // a root sits exactly on the abscissa (weight 0)
    std::vector<double> residuals;  // |1 - c zetabar(i chi)| per returned root
};

struct Spectrum {
    std::vector<double> eigen_lengths;  // nu = 1/chi, descending
    SpectrumReport search_report;

    bool breakdown() const { return eigen_lengths.empty(); }
};

namespace diffusion_detail {

// 1 - c zetabar(i chi), on the continuation past the abscissa where one exists.
inline double characteristic(const TransportProblem& p, double chi) {
    return 1.0 - p.c() * freepath_detail::zeta_u(p.model(), p.d(), -chi * chi);
}

}  // namespace diffusion_detail

inline Spectrum discrete_spectrum(const TransportProblem& p, const SpectrumOptions& opt = {}) {
    using diffusion_detail::characteristic;
    const FreePathModel& model = p.model();
    const double a = model.divergence_abscissa();
    const bool meromorphic = propagator_is_meromorphic(model, p.d());
    Spectrum out;
    SpectrumReport& rep = out.search_report;
    rep.abscissa = a;
    rep.continued = meromorphic && std::isfinite(a);

    auto eval = [&](double chi) {
        double f;
        try {
            f = characteristic(p, chi);
        } catch (const DivergenceError&) {
            return -std::numeric_limits<double>::infinity();  // sitting on a pole
        }
        if (std::isnan(f)) {
            std::ostringstream msg;
            msg << "discrete_spectrum: characteristic function is NaN at chi = " << chi << " for " << model.spec();
            throw NumericError(msg.str());
        }
        return f;
    };

    // Scan grid: geometric up to the abscissa (or chi_max), with extra points
    // crowding toward the abscissa from both sides.
    std::vector<double> grid;
    const double top = std::isfinite(a) ? (meromorphic ? std::max(opt.chi_max, 2.0 * a) : a) : opt.chi_max;
    const double bottom = 1e-4 * std::min(1.0, std::isfinite(a) && a > 0.0 ? a : 1.0);
    if (a == 0.0) {
        rep.chi_end = 0.0;
        return out;  // no exponential moments: zetabar(i chi) diverges for every chi > 0
    }
    for (int i = 0; i < opt.grid_points; ++i) {
        const double chi = bottom * std::pow(top / bottom, double(i) / (opt.grid_points - 1));
        if (std::isfinite(a) && std::abs(chi - a) < 1e-3 * a) continue;
        if (!meromorphic && std::isfinite(a) && chi >= a) break;
        grid.push_back(chi);
    }
    if (std::isfinite(a)) {
        for (int e = 3; e <= 15; ++e) {
            grid.push_back(a * (1.0 - std::pow(10.0, -e)));
            if (meromorphic) grid.push_back(a * (1.0 + std::pow(10.0, -e)));
        }
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    rep.grid_points = static_cast<int>(grid.size());
    rep.chi_end = grid.back();

    std::vector<double> roots;
    double prev_chi = 0.0, prev_f = 1.0 - p.c();
    for (double chi : grid) {
        const double f = eval(chi);
        if (std::signbit(f) != std::signbit(prev_f)) {
            ++rep.brackets;
            double lo = prev_chi, hi = chi, flo = prev_f;
            int it = 0;
            for (; it < 200 && hi - lo > 1e-9 * hi; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = eval(mid);
                if (std::signbit(fm) == std::signbit(flo)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            // Secant polish, kept inside the bracket.
            double x0 = lo, x1 = hi, f0 = eval(lo), f1 = eval(hi);
            for (int s = 0; s < 60 && f1 != f0; ++s, ++it) {
                const double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
                if (!(x2 > std::min(lo, hi) - 1e-15 && x2 < std::max(lo, hi) + 1e-15)) break;
                x0 = x1;
                f0 = f1;
                x1 = x2;
                f1 = eval(x1);
                if (std::abs(x1 - x0) <= 1e-16 * x1 || f1 == 0.0) break;
            }
            rep.iterations += it;
            const double root = std::abs(f1) <= std::abs(eval(0.5 * (lo + hi))) ? x1 : 0.5 * (lo + hi);
            const double residual = std::abs(eval(root));
            // A pole also changes sign; there the residual blows up instead of vanishing.
            if (residual <= 1e-6) {
                roots.push_back(root);
                rep.residuals.push_back(residual);
            } else {
                ++rep.rejected_poles;
            }
        }
        prev_chi = chi;
        prev_f = f;
    }

    // A root exactly on the abscissa, where zetabar stays finite.
    const double limit = propagator_abscissa_limit(model, p.d());
    if (std::isfinite(limit) && std::abs(1.0 - p.c() * limit) <= opt.residual_tol) {
        roots.push_back(a);
        rep.residuals.push_back(std::abs(1.0 - p.c() * limit));
        rep.abscissa_root = true;
    }

    std::vector<std::size_t> order(roots.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return roots[x] < roots[y]; });
    std::vector<double> residuals;
    for (std::size_t i : order) {
        out.eigen_lengths.push_back(1.0 / roots[i]);
        residuals.push_back(rep.residuals[i]);
    }
    rep.residuals = std::move(residuals);
    return out;
}

// ---------------------------------------------------------------------------
// Rigorous asymptotic diffusion

struct ResidueOptions {
    double max_spread = 1e-7;  // Richardson disagreement that counts as ill-conditioned
};

namespace diffusion_detail {

// dh/du at u0 for h(u) = zetabar as a function of u = z^2, by Richardson
// extrapolation of central differences; `room` bounds the step so the stencil
// stays clear of the abscissa.
inline double zeta_u_derivative(const TransportProblem& p, double u0, double room, double max_spread) {
    auto h = [&](double u) { return freepath_detail::zeta_u(p.model(), p.d(), u); };
    double step = std::min({0.05 * std::max(std::abs(u0), 0.05), 0.25 * room});
    constexpr int levels = 7;
    double table[levels][levels];
    for (int i = 0; i < levels; ++i, step *= 0.5) {
        table[i][0] = (h(u0 + step) - h(u0 - step)) / (2.0 * step);
        double f = 4.0;
        for (int j = 1; j <= i; ++j, f *= 4.0) table[i][j] = table[i][j - 1] + (table[i][j - 1] - table[i - 1][j - 1]) / (f - 1.0);
    }
    double best = table[1][1], spread = std::abs(table[1][1] - table[0][0]);
    for (int i = 2; i < levels; ++i) {
        const double diff = std::abs(table[i][i] - table[i - 1][i - 1]);
        if (diff < spread) {
            spread = diff;
            best = table[i][i];
        }
    }
    if (!(spread <= max_spread * std::abs(best))) {
        std::ostringstream msg;
        msg << "residue weight: derivative of the propagator is ill-conditioned at u = " << u0
            << " (Richardson spread " << spread / std::abs(best) << ")";
        throw NumericError(msg.str());
    }
    return best;
}

}  // namespace diffusion_detail

// Residue weight A of the mode with inverse length chi:
//   A = -N(i chi) / (c h'(-chi^2) chi^2),
// N = zetabar for the collision density, Xbar for the scalar flux.
inline double residue_weight(const TransportProblem& p, Quantity q, double chi, const ResidueOptions& opt = {}) {
    const double a = p.model().divergence_abscissa();
    const double u0 = -chi * chi;
    const double room = std::isfinite(a) ? std::abs(a * a - chi * chi) : std::numeric_limits<double>::infinity();
    if (room == 0.0) return 0.0;  // on the abscissa the derivative is infinite and the mode vanishes
    const double dh = diffusion_detail::zeta_u_derivative(p, u0, room, opt.max_spread);
    const double numerator = q == Quantity::collision ? freepath_detail::zeta_u(p.model(), p.d(), u0)
                                                      : freepath_detail::stretched_u(p.model(), p.d(), u0);
    return -numerator / (p.c() * dh * chi * chi);
}

inline DiffusionApproximation rigorous_approximation(const TransportProblem& p, Quantity q,
                                                     const SpectrumOptions& spectrum_opt = {},
                                                     const ResidueOptions& residue_opt = {}) {
    diffusion_detail::require_flux_moment(p, q);
    const Spectrum spectrum = discrete_spectrum(p, spectrum_opt);
    std::vector<DiffusionMode> modes;
    for (double nu : spectrum.eigen_lengths) modes.push_back({nu, residue_weight(p, q, 1.0 / nu, residue_opt)});
    DiffusionApproximation out(p, q, Flavor::rigorous, false, std::move(modes));
    if (spectrum.breakdown()) {
        out.add_warning("no discrete eigenvalue: the rigorous diffusion approximation breaks down for " +
                        p.model().spec() + " at this albedo and dimension");
    }
    if (spectrum.search_report.abscissa_root) {
        out.add_warning("eigenvalue on the abscissa of convergence; its mode has zero weight");
    }
    return out;
}

}  // namespace glbe
