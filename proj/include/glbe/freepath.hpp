#pragma once
// Free-path distribution families with unit mean free path, and their
// d-dimensional transformed propagators.

#include <charconv>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <string_view>

#include "glbe/errors.hpp"
#include "glbe/specfun.hpp"
#include "glbe/transform.hpp"

namespace glbe {

enum class Family { exponential, gamma, chi, beta_prime, pearson, bessel_k };

inline std::string_view family_name(Family f) {
    switch (f) {
        case Family::exponential: return "exp";
        case Family::gamma: return "gamma";
        case Family::chi: return "chi";
        case Family::beta_prime: return "betaprime";
        case Family::pearson: return "pearson";
        case Family::bessel_k: return "besselk";
    }
    return "?";
}

// Uniform variate on the open interval (0, 1) from any 64-bit engine.
template <class Urbg>
double uniform_open01(Urbg& rng) {
    static_assert(Urbg::max() - Urbg::min() == std::numeric_limits<std::uint64_t>::max(), "needs a 64-bit engine");
    return (static_cast<double>((rng() - Urbg::min()) >> 11) + 0.5) * 0x1.0p-53;
}

class FreePathModel {
public:
    static FreePathModel exponential() { return FreePathModel(Family::exponential, 1.0); }

    static FreePathModel gamma(double k) {
        if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("gamma free path: k must be positive");
        if (k == 1.0) return FreePathModel(Family::gamma, 1.0);
        return FreePathModel(Family::gamma, k);
    }

    static FreePathModel chi(double k) {
        if (!(k >= 1.0) || !std::isfinite(k)) throw DomainError("chi free path: k must be at least 1");
        return FreePathModel(Family::chi, k);
    }

    static FreePathModel beta_prime(double k) {
        if (!(k > 2.0) || !std::isfinite(k)) throw DomainError("beta-prime free path: k must exceed 2");
        return FreePathModel(Family::beta_prime, k);
    }

    static FreePathModel pearson() { return FreePathModel(Family::pearson, 1.0); }

    // p(s) proportional to s^{m/2} K_{(m-2)/2}(s), rescaled to unit mean; diffusion is
    // exact for this law in m dimensions.
    static FreePathModel bessel_k(double m) {
        if (!(m >= 1.0) || !std::isfinite(m)) throw DomainError("bessel-K free path: m must be at least 1");
        return FreePathModel(Family::bessel_k, m);
    }

    // Parses `exp`, `gamma:k=<v>`, `chi:k=<v>`, `betaprime:k=<v>`, `pearson`, `besselk:m=<v>`.
    static FreePathModel parse(std::string_view text) {
        const auto colon = text.find(':');
        const std::string_view head = text.substr(0, colon);
        auto parameter = [&](std::string_view key) {
            if (colon == std::string_view::npos) throw DomainError("model '" + std::string(text) + "' needs " + std::string(key) + "=<value>");
            std::string_view rest = text.substr(colon + 1);
            if (rest.substr(0, key.size()) != key || rest.size() <= key.size() || rest[key.size()] != '=') {
                throw DomainError("model '" + std::string(text) + "': expected " + std::string(key) + "=<value>");
            }
            rest.remove_prefix(key.size() + 1);
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), v);
            if (ec != std::errc() || ptr != rest.data() + rest.size()) {
                throw DomainError("model '" + std::string(text) + "': bad number '" + std::string(rest) + "'");
            }
            return v;
        };
        auto no_parameter = [&] {
            if (colon != std::string_view::npos) throw DomainError("model '" + std::string(head) + "' takes no parameter");
        };
        if (head == "exp" || head == "exponential") {
            no_parameter();
            return exponential();
        }
        if (head == "pearson") {
            no_parameter();
            return pearson();
        }
        if (head == "gamma") return gamma(parameter("k"));
        if (head == "chi") return chi(parameter("k"));
        if (head == "betaprime") return beta_prime(parameter("k"));
        if (head == "besselk") return bessel_k(parameter("m"));
        throw DomainError("unknown free-path model '" + std::string(text) + "'");
    }

    Family family() const { return family_; }
    double parameter() const { return parameter_; }

    // Gamma with k = 1 is the exponential law; both report it the same way here.
    bool is_exponential() const {
        return family_ == Family::exponential || (family_ == Family::gamma && parameter_ == 1.0);
    }

    // False for the Pearson delta, whose density has no pointwise value.
    bool has_density() const { return family_ != Family::pearson; }

    std::string spec() const {
        auto num = [](double v) {
            char buf[32];
            const auto res = std::to_chars(buf, buf + sizeof buf, v);
            return std::string(buf, res.ptr);
        };
        switch (family_) {
            case Family::exponential: return "exp";
            case Family::pearson: return "pearson";
            case Family::gamma: return "gamma:k=" + num(parameter_);
            case Family::chi: return "chi:k=" + num(parameter_);
            case Family::beta_prime: return "betaprime:k=" + num(parameter_);
            case Family::bessel_k: return "besselk:m=" + num(parameter_);
        }
        return {};
    }

    // Chi: s^2 a^2 is Gamma(k/2)-distributed.  Bessel-K: the unscaled variable has mean mu.
    double chi_rate() const { return scale_; }
    double bessel_k_mean() const { return scale_; }

    double pdf(double s) const {
        if (!(s >= 0.0)) throw DomainError("pdf: s must be non-negative");
        const double k = parameter_;
        if (s == 0.0) {
            switch (family_) {
                case Family::exponential: return 1.0;
                case Family::gamma:
                    if (k < 1.0) throw DivergenceError("pdf: gamma density diverges at s = 0 for k < 1");
                    return k == 1.0 ? 1.0 : 0.0;
                case Family::chi: return k == 1.0 ? 2.0 * scale_ / std::sqrt(std::numbers::pi) : 0.0;
                case Family::beta_prime: return 0.0;
                case Family::pearson: break;
                case Family::bessel_k:
                    return parameter_ == 1.0
                               ? scale_ / std::tgamma(1.5) * std::sqrt(0.5 * std::numbers::pi)
                               : 0.0;
            }
        }
        return pdf_over_power(s, 0.0);
    }

    // pdf(s) / s^p for s > 0, evaluated in log space so that tiny s does not underflow both factors.
    double pdf_over_power(double s, double p) const {
        if (!(s > 0.0)) throw DomainError("pdf_over_power: s must be positive");
        const double k = parameter_, ls = std::log(s);
        switch (family_) {
            case Family::exponential: return std::exp(-s - p * ls);
            case Family::gamma: return std::exp(k * std::log(k) + (k - 1.0 - p) * ls - k * s - std::lgamma(k));
            case Family::chi:
                return 2.0 * std::exp(k * std::log(scale_) + (k - 1.0 - p) * ls - scale_ * scale_ * s * s -
                                      std::lgamma(0.5 * k));
            case Family::beta_prime: return std::exp((k - 2.0 - p) * ls + (1.0 - 2.0 * k) * std::log1p(s) - log_beta_);
            case Family::pearson:
                throw UnsupportedQuery("pdf: the Pearson law is a point mass at s = 1; use sample() or extinction()");
            case Family::bessel_k: {
                const double m = parameter_, x = scale_ * s;
                const double front = scale_ * m / std::tgamma(0.5 * m + 1.0);
                const double order = std::abs(0.5 * m - 1.0);
                return front * std::exp(0.5 * m * std::log(0.5 * x) - x - p * ls) * sf::bessel_k_scaled(order, x);
            }
        }
        return 0.0;
    }

    // Survival function E(s) = P(S > s).
    double extinction(double s) const {
        if (!(s >= 0.0)) throw DomainError("extinction: s must be non-negative");
        const double k = parameter_;
        switch (family_) {
            case Family::exponential: return std::exp(-s);
            case Family::gamma: return s == 0.0 ? 1.0 : sf::upper_gamma_regularized(k, k * s);
            case Family::chi: return s == 0.0 ? 1.0 : sf::upper_gamma_regularized(0.5 * k, scale_ * scale_ * s * s);
            case Family::beta_prime: return sf::beta_regularized(k, k - 1.0, 1.0 / (1.0 + s));
            case Family::pearson: return s < 1.0 ? 1.0 : 0.0;
            case Family::bessel_k: {
                const double m = parameter_, x = scale_ * s;
                if (x == 0.0) return 1.0;
                return m / std::tgamma(0.5 * m + 1.0) * std::exp(0.5 * m * std::log(0.5 * x) - x) *
                       sf::bessel_k_scaled(0.5 * m, x);
            }
        }
        return 0.0;
    }

    template <class Urbg>
    double sample(Urbg& rng) const {
        const double k = parameter_;
        switch (family_) {
            case Family::exponential: return -std::log(uniform_open01(rng));
            case Family::gamma:
                if (k == 1.0) return -std::log(uniform_open01(rng));
                return std::gamma_distribution<double>(k, 1.0 / k)(rng);
            case Family::chi: return std::sqrt(std::gamma_distribution<double>(0.5 * k, 1.0)(rng)) / scale_;
            case Family::beta_prime: {
                const double a = std::gamma_distribution<double>(k - 1.0, 1.0)(rng);
                const double b = std::gamma_distribution<double>(k, 1.0)(rng);
                return a / b;
            }
            case Family::pearson: return 1.0;
            case Family::bessel_k: {
                const double w = -std::log(uniform_open01(rng));
                const double g = std::gamma_distribution<double>(0.5 * parameter_, 1.0)(rng);
                return 2.0 * std::sqrt(w * g) / scale_;
            }
        }
        return 0.0;
    }

    // <s^2>.
    double mean_square() const {
        const double k = parameter_;
        switch (family_) {
            case Family::exponential: return 2.0;
            case Family::gamma: return 1.0 / k + 1.0;
            case Family::chi:
                return std::exp(std::lgamma(0.5 * k + 1.0) + std::lgamma(0.5 * k) - 2.0 * std::lgamma(0.5 * (k + 1.0)));
            case Family::beta_prime: return k / (k - 2.0);
            case Family::pearson: return 1.0;
            case Family::bessel_k: return 2.0 * parameter_ / (scale_ * scale_);
        }
        return 0.0;
    }

    bool has_mean_square_extinction() const { return !(family_ == Family::beta_prime && parameter_ <= 3.0); }

    // int_0^inf E(s) s^2 ds = <s^3>/3.
    double mean_square_extinction() const {
        const double k = parameter_;
        switch (family_) {
            case Family::exponential: return 2.0;
            case Family::gamma: return (k + 1.0) * (k + 2.0) / (3.0 * k * k);
            case Family::chi:
                return (k + 1.0) * std::exp(2.0 * (std::lgamma(0.5 * k) - std::lgamma(0.5 * (k + 1.0)))) / 6.0;
            case Family::beta_prime:
                if (k <= 3.0) {
                    throw DomainError("mean_square_extinction: diverges for beta-prime k <= 3; "
                                      "scalar-flux diffusion is unavailable");
                }
                return k * (k + 1.0) / (3.0 * (k * k - 5.0 * k + 6.0));
            case Family::pearson: return 1.0 / 3.0;
            case Family::bessel_k: {
                const double m = parameter_;
                const double third = 8.0 * std::exp(std::lgamma(2.5) + std::lgamma(0.5 * m + 1.5) - std::lgamma(0.5 * m));
                return third / (3.0 * scale_ * scale_ * scale_);
            }
        }
        return 0.0;
    }

    // Decay rate of the density: the transform is analytic for Im z below it.
    double divergence_abscissa() const {
        switch (family_) {
            case Family::exponential: return 1.0;
            case Family::gamma: return parameter_;
            case Family::bessel_k: return scale_;
            case Family::beta_prime: return 0.0;
            case Family::chi:
            case Family::pearson: return std::numeric_limits<double>::infinity();
        }
        return 0.0;
    }

    Decay decay() const {
        switch (family_) {
            case Family::beta_prime: return Decay::algebraic;
            case Family::pearson: return Decay::compact_support;
            default: return Decay::exponential;
        }
    }

    friend bool operator==(const FreePathModel& a, const FreePathModel& b) {
        return a.family_ == b.family_ && a.parameter_ == b.parameter_;
    }

private:
    FreePathModel(Family f, double p) : family_(f), parameter_(p) {
        if (f == Family::chi) scale_ = std::exp(std::lgamma(0.5 * (p + 1.0)) - std::lgamma(0.5 * p));
        if (f == Family::bessel_k) {
            scale_ = std::exp(0.5 * std::log(std::numbers::pi) + std::lgamma(0.5 * (p + 1.0)) - std::lgamma(0.5 * p));
        }
        if (f == Family::beta_prime) log_beta_ = std::lgamma(p - 1.0) + std::lgamma(p) - std::lgamma(2.0 * p - 1.0);
    }

    Family family_;
    double parameter_;
    double scale_ = 1.0;
    double log_beta_ = 0.0;
};

// Free-function spellings of the model queries.
inline double pdf(const FreePathModel& m, double s) { return m.pdf(s); }
inline double extinction(const FreePathModel& m, double s) { return m.extinction(s); }
inline double mean_square(const FreePathModel& m) { return m.mean_square(); }
inline double mean_square_extinction(const FreePathModel& m) { return m.mean_square_extinction(); }
template <class Urbg>
double sample(const FreePathModel& m, Urbg& rng) {
    return m.sample(rng);
}

class TransportProblem {
public:
    TransportProblem(FreePathModel model, double d, double c) : model_(model), d_(d), c_(c) {
        if (!(d >= 1.0) || !std::isfinite(d)) throw DomainError("dimension d must be a finite real >= 1");
        if (!(c > 0.0 && c < 1.0)) throw DomainError("albedo c must lie in (0, 1): non-multiplying medium with absorption");
    }

    const FreePathModel& model() const { return model_; }
    double d() const { return d_; }
    double c() const { return c_; }

private:
    FreePathModel model_;
    double d_;
    double c_;
};

namespace freepath_detail {

inline const sf::AccuracyPolicy& policy() {
    static const sf::AccuracyPolicy p{1e-14, 200000, 0.999};
    return p;
}

inline bool is_int(double x) { return sf::is_integer(x); }

// Gauss 2F1(a, b; c; -x) for x > -1, with a Pfaff transformation for large positive x.
inline double hyp2f1_neg(double a, double b, double c, double x) {
    if (std::abs(x) < 0.3) return sf::hyp_pfq({a, b}, {c}, -x, policy());
    if (x > 0.0) {
        const double w = x / (1.0 + x);
        return std::pow(1.0 + x, -a) * sf::hyp2f1(a, c - b, c, w, policy());
    }
    return sf::hyp2f1(a, b, c, -x, policy());
}

// Forward transform of a density given directly as a function of r (not divided by Omega_d).
template <class W>
double transform_of_density(W&& w, double d, double z, Decay decay, double support, double tol = 1e-12) {
    TransformOptions opt;
    opt.rel_tol = tol;
    return transform_detail::hankel_integral(w, d, z, decay, support, {}, opt).value;
}

template <class W>
double transform_of_density_imag(W&& w, double d, double chi) {
    RadialFunction f;
    f.evaluator = [&](double r) { return w(r) / omega(d, r); };
    TransformOptions opt;
    opt.rel_tol = 1e-12;
    return forward_ft_imag(f, d, chi, opt).value;
}

inline double exponential_zeta(double d, double u) {
    if (std::abs(u) < 0.3) return sf::hyp_pfq({0.5, 1.0}, {0.5 * d}, -u, policy());
    const double z = std::sqrt(std::abs(u));
    const auto arctan_ratio = [&] { return u > 0.0 ? std::atan(z) / z : std::atanh(z) / z; };
    if (d == 1.0) return 1.0 / (1.0 + u);
    if (d == 2.0) return 1.0 / std::sqrt(1.0 + u);
    if (d == 3.0) return arctan_ratio();
    if (d == 4.0) return 2.0 / (std::sqrt(1.0 + u) + 1.0);
    if (d == 5.0) return 3.0 * ((1.0 + u) * arctan_ratio() - 1.0) / (2.0 * u);
    if (d == 6.0) {
        const double root = std::sqrt(1.0 + u);
        return 4.0 * (2.0 * root * u - 3.0 * u + 2.0 * root - 2.0) / (3.0 * u * u);
    }
    return hyp2f1_neg(0.5, 1.0, 0.5 * d, u);
}

// Gamma(k) propagator as a function of u = z^2, including the meromorphic
// continuation beyond chi = k for the rational cases.
inline double gamma_zeta(double k, double d, double u) {
    const double x = u / (k * k);
    const bool integer_k = is_int(k);
    if (d == 1.0) {
        if (u >= 0.0) return std::pow(1.0 + x, -0.5 * k) * std::cos(k * std::atan(std::sqrt(x)));
        const double y = std::sqrt(-x);
        if (y < 1.0) return std::pow(1.0 - y * y, -0.5 * k) * std::cosh(k * std::atanh(y));
        if (y == 1.0) throw DivergenceError("gamma propagator: pole at chi = k");
        return 0.5 * (std::pow(1.0 - y, -k) + std::pow(1.0 + y, -k));
    }
    if (d == 3.0) {
        if (std::abs(x) < 1e-6) return sf::hyp_pfq({0.5 * k, 0.5 * (k + 1.0)}, {1.5}, -x, policy());
        const double p = k - 1.0;
        if (u >= 0.0) {
            const double t = std::sqrt(x);
            return std::pow(1.0 + x, -0.5 * p) * std::sin(p * std::atan(t)) / (t * p);
        }
        const double y = std::sqrt(-x);
        if (y < 1.0) return std::pow(1.0 - y * y, -0.5 * p) * std::sinh(p * std::atanh(y)) / (y * p);
        if (y == 1.0) throw DivergenceError("gamma propagator: pole at chi = k");
        return (std::pow(1.0 + y, -p) - std::pow(1.0 - y, -p)) / (-2.0 * y * p);
    }
    if (std::abs(x) < 0.3) return sf::hyp_pfq({0.5 * k, 0.5 * (k + 1.0)}, {0.5 * d}, -x, policy());
    if (integer_k && k >= 2.0 && k <= 4.0 && (d == 2.0 || d == 4.0 || d == 5.0)) {
        const int ki = static_cast<int>(k);
        if (d == 2.0) {
            if (ki == 2) return 8.0 / std::pow(u + 4.0, 1.5);
            if (ki == 3) return -27.0 * (u - 18.0) / (2.0 * std::pow(u + 9.0, 2.5));
            return -512.0 * (3.0 * u - 32.0) / std::pow(u + 16.0, 3.5);
        }
        if (d == 4.0) {
            if (ki == 2) {
                const double root = std::sqrt(u + 4.0);
                return 8.0 / (root * (root + 2.0));
            }
            if (ki == 3) return 27.0 / std::pow(u + 9.0, 1.5);
            return std::pow(1.0 + u / 16.0, -2.5);
        }
        if (ki == 4) {
            if (u == -16.0) throw DivergenceError("gamma propagator: pole at chi = k");
            return 256.0 / ((u + 16.0) * (u + 16.0));
        }
        const double z = std::sqrt(std::abs(u));
        if (ki == 2) {
            if (u > 0.0) return 12.0 * (z - 2.0 * std::atan(0.5 * z)) / (z * z * z);
            return 12.0 * (2.0 * std::atanh(0.5 * z) - z) / (z * z * z);
        }
        if (u > 0.0) return 81.0 * ((u + 9.0) * std::atan(z / 3.0) - 3.0 * z) / (2.0 * z * z * z * (u + 9.0));
        return 81.0 * (3.0 * z - (9.0 + u) * std::atanh(z / 3.0)) / (2.0 * z * z * z * (9.0 + u));
    }
    return hyp2f1_neg(0.5 * k, 0.5 * (k + 1.0), 0.5 * d, x);
}

inline bool gamma_is_meromorphic(double k, double d) {
    return sf::is_integer(k) && (d == 1.0 || d == 3.0 || (d == 5.0 && k == 4.0));
}

}  // namespace freepath_detail

// Limit of zeta_d(i chi) as chi approaches the divergence abscissa from below;
// +infinity when the transform diverges there.
inline double propagator_abscissa_limit(const FreePathModel& model, double d) {
    const double inf = std::numeric_limits<double>::infinity();
    auto gauss = [&](double a, double b, double c) {
        if (c - a - b <= 0.0) return inf;
        return std::exp(std::lgamma(c) + std::lgamma(c - a - b) - std::lgamma(c - a) - std::lgamma(c - b));
    };
    switch (model.family()) {
        case Family::exponential: return gauss(0.5, 1.0, 0.5 * d);
        case Family::gamma: {
            const double k = model.parameter();
            return gauss(0.5 * k, 0.5 * (k + 1.0), 0.5 * d);
        }
        case Family::bessel_k: return gauss(1.0, 0.5 * model.parameter(), 0.5 * d);
        case Family::beta_prime: return 1.0;
        default: return inf;
    }
}

// Whether zeta_d has a meromorphic continuation past the abscissa, so that
// characteristic roots beyond it are meaningful.
inline bool propagator_is_meromorphic(const FreePathModel& model, double d) {
    switch (model.family()) {
        case Family::exponential: return d == 1.0;
        case Family::gamma: return freepath_detail::gamma_is_meromorphic(model.parameter(), d);
        case Family::bessel_k: return d == model.parameter();
        case Family::chi:
        case Family::pearson: return true;  // entire
        case Family::beta_prime: return false;
    }
    return false;
}

namespace freepath_detail {

// zeta_d as a function of u = z^2 (u < 0 means z = i sqrt(-u)).
inline double zeta_u(const FreePathModel& model, double d, double u) {
    if (u == 0.0) return 1.0;
    const double k = model.parameter();
    const double a = model.divergence_abscissa();
    if (u < 0.0 && -u >= a * a && !propagator_is_meromorphic(model, d)) {
        throw DomainError("propagator: imaginary argument at or beyond the divergence abscissa");
    }
    switch (model.family()) {
        case Family::exponential: return exponential_zeta(d, u);
        case Family::gamma:
            if (k == 1.0) return exponential_zeta(d, u);
            try {
                return gamma_zeta(k, d, u);
            } catch (const ConvergenceError&) {
                auto w = [&](double r) { return model.pdf(r); };
                if (u > 0.0) return transform_of_density(w, d, std::sqrt(u), Decay::exponential, std::numeric_limits<double>::infinity());
                return transform_of_density_imag(w, d, std::sqrt(-u));
            }
        case Family::chi: {
            const double x = 0.25 * u / (model.chi_rate() * model.chi_rate());
            if (k == d) return std::exp(-x);
            try {
                return sf::hyp1f1(0.5 * k, 0.5 * d, -x, policy());
            } catch (const ConvergenceError&) {
                auto w = [&](double r) { return model.pdf(r); };
                return transform_of_density(w, d, std::sqrt(u), Decay::exponential, std::numeric_limits<double>::infinity());
            }
        }
        case Family::pearson:
            return u > 0.0 ? kernel_lambda(d, std::sqrt(u)) : kernel_lambda_imag(d, std::sqrt(-u));
        case Family::beta_prime: {
            auto w = [&](double r) { return model.pdf(r); };
            return transform_of_density(w, d, std::sqrt(u), Decay::algebraic, std::numeric_limits<double>::infinity());
        }
        case Family::bessel_k: {
            const double mu = model.bessel_k_mean();
            const double x = u / (mu * mu);
            if (d == k) {
                if (x == -1.0) throw DivergenceError("propagator: pole at chi = mean");
                return 1.0 / (1.0 + x);
            }
            try {
                return hyp2f1_neg(1.0, 0.5 * k, 0.5 * d, x);
            } catch (const ConvergenceError&) {
                auto w = [&](double r) { return model.pdf(r); };
                if (u > 0.0) return transform_of_density(w, d, std::sqrt(u), Decay::exponential, std::numeric_limits<double>::infinity());
                return transform_of_density_imag(w, d, std::sqrt(-u));
            }
        }
    }
    return 0.0;
}

// Stretched-extinction transform Xbar as a function of u = z^2.
inline double stretched_u(const FreePathModel& model, double d, double u) {
    if (u == 0.0) return 1.0;
    const double k = model.parameter();
    const double a = model.divergence_abscissa();
    const bool continued_gamma = model.family() == Family::gamma && d == 1.0 && sf::is_integer(k);
    if (u < 0.0 && -u >= a * a && !continued_gamma && model.family() != Family::chi &&
        model.family() != Family::pearson) {
        throw DomainError("stretched propagator: imaginary argument at or beyond the divergence abscissa");
    }
    auto e = [&](double r) { return model.extinction(r); };
    auto quadrature = [&](Decay decay, double support) {
        if (u > 0.0) return transform_of_density(e, d, std::sqrt(u), decay, support);
        return transform_of_density_imag(e, d, std::sqrt(-u));
    };
    switch (model.family()) {
        case Family::exponential: return exponential_zeta(d, u);
        case Family::gamma: {
            if (k == 1.0) return exponential_zeta(d, u);
            if (continued_gamma) {
                // int_0^inf E(r) cos(z r) dr with E a finite sum of r^j e^{-k r}.
                const int n = static_cast<int>(k);
                double sum = 0.0, kj = 1.0;
                if (u >= 0.0) {
                    const std::complex<double> base(k, -std::sqrt(u));
                    for (int j = 0; j < n; ++j, kj *= k) sum += kj * std::real(std::pow(base, -(j + 1)));
                } else {
                    const double chi = std::sqrt(-u);
                    if (chi == k) throw DivergenceError("stretched propagator: pole at chi = k");
                    for (int j = 0; j < n; ++j, kj *= k) {
                        sum += 0.5 * kj * (std::pow(k + chi, -(j + 1)) + std::pow(k - chi, -(j + 1)));
                    }
                }
                return sum;
            }
            const double x = u / (k * k);
            if (sf::is_integer(k) && k <= 16.0) {
                // E(r) = e^{-kr} sum_{j<k} (kr)^j / j!, and each term transforms to a 2F1.
                double sum = 0.0;
                for (int j = 0; j < static_cast<int>(k); ++j) sum += hyp2f1_neg(0.5 * (j + 1.0), 0.5 * (j + 2.0), 0.5 * d, x);
                return sum / k;
            }
            if (x < 0.5) {
                try {
                    return sf::hyp_pfq({0.5, 0.5 * (k + 1.0), 0.5 * (k + 2.0)}, {1.5, 0.5 * d}, -x, policy());
                } catch (const ConvergenceError&) {
                }
            }
            return quadrature(Decay::exponential, std::numeric_limits<double>::infinity());
        }
        case Family::chi: {
            const double rate = model.chi_rate();
            try {
                return sf::hyp_pfq({0.5 * (k + 1.0), 0.5}, {1.5, 0.5 * d}, -0.25 * u / (rate * rate), policy());
            } catch (const ConvergenceError&) {
                return quadrature(Decay::exponential, std::numeric_limits<double>::infinity());
            }
        }
        case Family::pearson: {
            const double z = std::sqrt(std::abs(u));
            if (d == 1.0) return u > 0.0 ? std::sin(z) / z : std::sinh(z) / z;
            if (d == 3.0 && u > 0.0) return sf::sine_integral(z) / z;
            try {
                return sf::hyp_pfq({0.5}, {1.5, 0.5 * d}, -0.25 * u, policy());
            } catch (const ConvergenceError&) {
                return quadrature(Decay::compact_support, 1.0);
            }
        }
        case Family::beta_prime:
            if (!model.has_mean_square_extinction()) {
                throw DomainError("stretched propagator: extinction moment diverges for beta-prime k <= 3");
            }
            return quadrature(Decay::algebraic, std::numeric_limits<double>::infinity());
        case Family::bessel_k: {
            const double mu = model.bessel_k_mean();
            try {
                return hyp2f1_neg(0.5, 0.5 * (k + 1.0), 0.5 * d, u / (mu * mu));
            } catch (const ConvergenceError&) {
                return quadrature(Decay::exponential, std::numeric_limits<double>::infinity());
            }
        }
    }
    return 0.0;
}

}  // namespace freepath_detail

// zeta_d(z): transform of the single-step displacement density p(r)/Omega_d(r).
inline double propagator(const TransportProblem& problem, double z) {
    if (!(z >= 0.0)) throw DomainError("propagator: z must be non-negative");
    return freepath_detail::zeta_u(problem.model(), problem.d(), z * z);
}

// zeta_d(i chi), real and increasing in chi below the divergence abscissa.
inline double propagator_imag(const TransportProblem& problem, double chi) {
    if (!(chi >= 0.0)) throw DomainError("propagator_imag: chi must be non-negative");
    if (chi >= problem.model().divergence_abscissa()) {
        throw DomainError("propagator_imag: chi at or beyond the divergence abscissa");
    }
    return freepath_detail::zeta_u(problem.model(), problem.d(), -chi * chi);
}

// zeta_d(i chi) on the meromorphic continuation (rational or entire cases only).
inline double propagator_continued(const TransportProblem& problem, double chi) {
    if (!propagator_is_meromorphic(problem.model(), problem.d()) && chi >= problem.model().divergence_abscissa()) {
        throw DomainError("propagator_continued: no meromorphic continuation for this model and dimension");
    }
    return freepath_detail::zeta_u(problem.model(), problem.d(), -chi * chi);
}

// Xbar(z): transform of E(r)/Omega_d(r).
inline double stretched_propagator(const TransportProblem& problem, double z) {
    if (!(z >= 0.0)) throw DomainError("stretched_propagator: z must be non-negative");
    if (!problem.model().has_mean_square_extinction()) {
        throw DomainError("stretched_propagator: extinction moment diverges; scalar-flux diffusion unavailable");
    }
    return freepath_detail::stretched_u(problem.model(), problem.d(), z * z);
}

inline double stretched_propagator_imag(const TransportProblem& problem, double chi) {
    if (!(chi >= 0.0)) throw DomainError("stretched_propagator_imag: chi must be non-negative");
    if (!problem.model().has_mean_square_extinction()) {
        throw DomainError("stretched_propagator: extinction moment diverges; scalar-flux diffusion unavailable");
    }
    return freepath_detail::stretched_u(problem.model(), problem.d(), -chi * chi);
}

}  // namespace glbe
