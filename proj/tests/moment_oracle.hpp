#pragma once
// Spatial moments computed from the raw free-path moments <s^j> by power-series
// algebra in u = z^2, independent of the library's transforms and catalogue.

#include <cmath>
#include <vector>

namespace glbe::test {

enum class OracleFamily { exponential, gamma, chi, beta_prime, pearson, bessel_k };

struct OracleModel {
    OracleFamily family;
    double k = 1.0;

    // <s^j> at unit mean; infinite when the moment does not exist.
    double raw_moment(int j) const {
        const double x = j;
        switch (family) {
            case OracleFamily::exponential: return std::tgamma(x + 1.0);
            case OracleFamily::gamma: return std::exp(std::lgamma(k + x) - std::lgamma(k) - x * std::log(k));
            case OracleFamily::chi: {
                const double a = std::exp(std::lgamma(0.5 * (k + 1.0)) - std::lgamma(0.5 * k));
                return std::exp(std::lgamma(0.5 * (k + x)) - std::lgamma(0.5 * k) - x * std::log(a));
            }
            case OracleFamily::beta_prime:
                if (x >= k) return INFINITY;
                return std::exp(std::lgamma(k - 1.0 + x) + std::lgamma(k - x) - std::lgamma(k - 1.0) - std::lgamma(k));
            case OracleFamily::pearson: return 1.0;
            case OracleFamily::bessel_k: {
                const double m = k;
                const double mu = std::exp(0.5 * std::log(M_PI) + std::lgamma(0.5 * (m + 1.0)) - std::lgamma(0.5 * m));
                return std::exp(x * std::log(2.0) + std::lgamma(1.0 + 0.5 * x) + std::lgamma(0.5 * (m + x)) -
                                std::lgamma(0.5 * m) - x * std::log(mu));
            }
        }
        return NAN;
    }
};

using Series = std::vector<double>;

inline Series multiply(const Series& a, const Series& b) {
    Series out(a.size(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; i + j < a.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

inline Series reciprocal(const Series& a) {
    Series out(a.size(), 0.0);
    out[0] = 1.0 / a[0];
    for (std::size_t n = 1; n < a.size(); ++n) {
        double s = 0.0;
        for (std::size_t j = 1; j <= n; ++j) s += a[j] * out[n - j];
        out[n] = -s / a[0];
    }
    return out;
}

// Taylor coefficients in u = z^2 of the d-dimensional transform of a radial
// density whose radial moments are given by `radial(2j)`.
template <class F>
Series transform_series(F&& radial, double d, int terms) {
    Series out(terms);
    for (int j = 0; j < terms; ++j) {
        const double sign = j % 2 == 0 ? 1.0 : -1.0;
        out[j] = sign * radial(2 * j) *
                 std::exp(std::lgamma(0.5 * d) - j * std::log(4.0) - std::lgamma(j + 1.0) - std::lgamma(0.5 * d + j));
    }
    return out;
}

// int r^m Omega_d f dr from the u-series of fbar.
inline double series_moment(const Series& s, double d, int m) {
    const int j = m / 2;
    const double sign = j % 2 == 0 ? 1.0 : -1.0;
    const double factor = std::exp(0.5 * std::log(M_PI) + std::lgamma(0.5 * (d + m)) - std::lgamma(0.5 * d) -
                                   std::lgamma(0.5 * (m + 1.0)));
    return factor * sign * std::tgamma(m + 1.0) * s[j];
}

struct MomentOracle {
    OracleModel model;
    double d;
    double c;
    int terms = 5;

    Series zeta() const {
        return transform_series([&](int j) { return model.raw_moment(j); }, d, terms);
    }
    // int E(s) s^j ds = <s^{j+1}>/(j+1)
    Series stretched() const {
        return transform_series([&](int j) { return model.raw_moment(j + 1) / (j + 1.0); }, d, terms);
    }
    Series power(const Series& a, int n) const {
        Series out(a.size(), 0.0);
        out[0] = 1.0;
        for (int i = 0; i < n; ++i) out = multiply(out, a);
        return out;
    }
    Series geometric() const {  // 1 / (1 - c zeta)
        Series den = zeta();
        for (double& v : den) v *= -c;
        den[0] += 1.0;
        return reciprocal(den);
    }

    double collision_nth(int n, int m) const {
        Series s = power(zeta(), n);
        for (double& v : s) v *= std::pow(c, n - 1);
        return series_moment(s, d, m);
    }
    double collision_total(int m) const { return series_moment(multiply(zeta(), geometric()), d, m); }
    double flux_nth(int n, int m) const {
        Series s = multiply(power(zeta(), n), stretched());
        for (double& v : s) v *= std::pow(c, n);
        return series_moment(s, d, m);
    }
    double flux_total(int m) const { return series_moment(multiply(stretched(), geometric()), d, m); }
};

}  // namespace glbe::test
