#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "glbe/freepath.hpp"
#include "glbe/specfun.hpp"
#include "glbe/transform.hpp"
#include "test_support.hpp"

using glbe::FreePathModel;
using glbe::TransportProblem;
using glbe::test::expect_rel;
using glbe::test::simpson;
using glbe::test::simpson_to_infinity;

namespace {

std::vector<FreePathModel> density_models() {
    return {FreePathModel::exponential(), FreePathModel::gamma(2.0),   FreePathModel::gamma(0.5),
            FreePathModel::gamma(3.5),    FreePathModel::chi(1.0),     FreePathModel::chi(3.0),
            FreePathModel::chi(2.5),      FreePathModel::beta_prime(5.0), FreePathModel::beta_prime(2.5),
            FreePathModel::bessel_k(2.0), FreePathModel::bessel_k(3.0)};
}

std::vector<FreePathModel> all_models() {
    auto v = density_models();
    v.push_back(FreePathModel::pearson());
    return v;
}

// Integral of g(s) p(s) over [0, inf) with s = x^2, which removes the
// integrable s^{k-1} spike of the small-k gamma law at the origin.
double expect_of(const FreePathModel& m, const std::function<double(double)>& g) {
    return simpson_to_infinity([&](double x) { return x == 0.0 ? 0.0 : 2.0 * x * m.pdf(x * x) * g(x * x); }, 1e-13);
}

}  // namespace

TEST(FreePathPdf, Examples) {
    expect_rel(FreePathModel::gamma(2.0).pdf(1.0), 4.0 * std::exp(-2.0), 1e-14);
    EXPECT_DOUBLE_EQ(FreePathModel::exponential().pdf(0.0), 1.0);
    expect_rel(FreePathModel::beta_prime(2.5).pdf(1.0), 1.0 / std::numbers::pi, 1e-14);
}

TEST(FreePathPdf, PearsonHasNoPointwiseDensity) {
    const auto p = FreePathModel::pearson();
    EXPECT_FALSE(p.has_density());
    EXPECT_THROW(p.pdf(1.0), glbe::UnsupportedQuery);
    EXPECT_THROW(FreePathModel::exponential().pdf(-0.1), glbe::DomainError);
}

TEST(FreePathPdf, NormalizedWithUnitMean) {
    for (const auto& m : density_models()) {
        SCOPED_TRACE(m.spec());
        expect_rel(expect_of(m, [](double) { return 1.0; }), 1.0, 1e-8);
        expect_rel(expect_of(m, [](double s) { return s; }), 1.0, 1e-8);
    }
}

TEST(FreePathExtinction, Examples) {
    const auto p = FreePathModel::pearson();
    EXPECT_EQ(p.extinction(0.5), 1.0);
    EXPECT_EQ(p.extinction(1.5), 0.0);
    expect_rel(FreePathModel::gamma(2.0).extinction(1.0), glbe::sf::upper_gamma_regularized(2.0, 2.0), 1e-14);
    expect_rel(FreePathModel::gamma(2.0).extinction(1.0), 3.0 * std::exp(-2.0), 1e-14);
    expect_rel(FreePathModel::exponential().extinction(2.0), std::exp(-2.0), 1e-15);
}

TEST(FreePathExtinction, MatchesIntegratedDensity) {
    for (const auto& m : density_models()) {
        SCOPED_TRACE(m.spec());
        EXPECT_DOUBLE_EQ(m.extinction(0.0), 1.0);
        double previous = 1.0;
        for (double s : {0.1, 0.5, 1.0, 2.0, 4.0}) {
            const double head = simpson([&](double x) { return x == 0.0 ? 0.0 : 2.0 * x * m.pdf(x * x); }, 0.0,
                                        std::sqrt(s), 1e-14);
            EXPECT_NEAR(m.extinction(s), 1.0 - head, 1e-9);
            EXPECT_LE(m.extinction(s), previous);
            previous = m.extinction(s);
        }
    }
}

TEST(FreePathMoments, Examples) {
    EXPECT_DOUBLE_EQ(FreePathModel::gamma(2.0).mean_square(), 1.5);
    EXPECT_DOUBLE_EQ(FreePathModel::exponential().mean_square(), 2.0);
    EXPECT_DOUBLE_EQ(FreePathModel::pearson().mean_square(), 1.0);
    expect_rel(FreePathModel::pearson().mean_square_extinction(), 1.0 / 3.0, 1e-15);
    expect_rel(FreePathModel::gamma(1.0).mean_square_extinction(), 2.0, 1e-15);
    expect_rel(FreePathModel::chi(1.0).mean_square_extinction(), std::numbers::pi / 3.0, 1e-14);
}

TEST(FreePathMoments, ClosedFormsMatchQuadrature) {
    for (const auto& m : density_models()) {
        SCOPED_TRACE(m.spec());
        EXPECT_GE(m.mean_square(), 1.0);
        if (m.family() == glbe::Family::beta_prime) continue;  // heavy tail; checked separately below
        expect_rel(m.mean_square(), expect_of(m, [](double s) { return s * s; }), 1e-8);
        const double mse = simpson_to_infinity([&](double s) { return m.extinction(s) * s * s; }, 1e-13);
        expect_rel(m.mean_square_extinction(), mse, 1e-8);
    }
    // For k = 5 the tail decays like s^-6, slowly enough that only a split integral converges.
    const auto bp = FreePathModel::beta_prime(5.0);
    auto tail_split = [](const std::function<double(double)>& f) {
        return simpson(f, 0.0, 1.0, 1e-14) + simpson([&](double t) { return t == 0.0 ? 0.0 : f(1.0 / t) / (t * t); },
                                                     0.0, 1.0, 1e-14);
    };
    expect_rel(bp.mean_square(), tail_split([&](double s) { return s * s * bp.pdf(s); }), 1e-8);
    expect_rel(bp.mean_square_extinction(), tail_split([&](double s) { return s * s * bp.extinction(s); }), 1e-8);
}

TEST(FreePathMoments, DivergentExtinctionMomentIsADomainError) {
    const auto bp = FreePathModel::beta_prime(2.5);
    EXPECT_FALSE(bp.has_mean_square_extinction());
    EXPECT_THROW(bp.mean_square_extinction(), glbe::DomainError);
    EXPECT_THROW(glbe::stretched_propagator(TransportProblem(bp, 3.0, 0.5), 1.0), glbe::DomainError);
}

TEST(FreePathSample, PearsonAlwaysOne) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(FreePathModel::pearson().sample(rng), 1.0);
}

TEST(FreePathSample, ExponentialMean) {
    std::mt19937_64 rng(11);
    const auto m = FreePathModel::exponential();
    double sum = 0.0;
    const int n = 1'000'000;
    for (int i = 0; i < n; ++i) sum += m.sample(rng);
    EXPECT_NEAR(sum / n, 1.0, 3e-3);
}

TEST(FreePathSample, BetaPrimeSecondMoment) {
    std::mt19937_64 rng(13);
    const auto m = FreePathModel::beta_prime(4.0);
    const int n = 1'000'000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double s = m.sample(rng);
        sum += s * s;
        sum2 += s * s * s * s;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / n);
    EXPECT_NEAR(mean, 2.0, 3.0 * se);
    EXPECT_DOUBLE_EQ(m.mean_square(), 2.0);
}

// Kolmogorov-Smirnov distance against 1 - extinction, which doubles as a check
// of every sampler against CDF inversion.
TEST(FreePathSample, KolmogorovSmirnovAgainstExtinction) {
    for (const auto& m : density_models()) {
        SCOPED_TRACE(m.spec());
        std::mt19937_64 rng(101);
        const int n = 40'000;
        std::vector<double> xs(n);
        for (double& x : xs) x = m.sample(rng);
        std::sort(xs.begin(), xs.end());
        double dmax = 0.0;
        for (int i = 0; i < n; ++i) {
            const double cdf = 1.0 - m.extinction(xs[i]);
            dmax = std::max({dmax, std::abs(cdf - double(i) / n), std::abs(cdf - double(i + 1) / n)});
        }
        EXPECT_LT(dmax * std::sqrt(double(n)), 1.95);  // 0.1% critical value
    }
}

TEST(FreePathParse, RoundTripAndErrors) {
    for (const auto& m : all_models()) EXPECT_EQ(FreePathModel::parse(m.spec()), m);
    EXPECT_TRUE(FreePathModel::parse("gamma:k=1").is_exponential());
    EXPECT_DOUBLE_EQ(FreePathModel::parse("chi:k=2.5").parameter(), 2.5);
    EXPECT_THROW(FreePathModel::parse("cauchy"), glbe::DomainError);
    EXPECT_THROW(FreePathModel::parse("gamma"), glbe::DomainError);
    EXPECT_THROW(FreePathModel::parse("gamma:k=abc"), glbe::DomainError);
    EXPECT_THROW(FreePathModel::parse("gamma:m=2"), glbe::DomainError);
    EXPECT_THROW(FreePathModel::parse("exp:k=2"), glbe::DomainError);
    EXPECT_THROW(FreePathModel::parse("betaprime:k=2"), glbe::DomainError);
    EXPECT_THROW(FreePathModel::parse("gamma:k=-1"), glbe::DomainError);
}

TEST(TransportProblemTest, ValidatesParameters) {
    const auto m = FreePathModel::exponential();
    EXPECT_NO_THROW(TransportProblem(m, 2.5, 0.5));
    EXPECT_THROW(TransportProblem(m, 0.5, 0.5), glbe::DomainError);
    EXPECT_THROW(TransportProblem(m, 3.0, 1.0), glbe::DomainError);
    EXPECT_THROW(TransportProblem(m, 3.0, 0.0), glbe::DomainError);
}

TEST(Propagator, Examples) {
    const auto e = FreePathModel::exponential();
    expect_rel(glbe::propagator(TransportProblem(e, 3, 0.5), 1.0), std::numbers::pi / 4.0, 1e-14);
    expect_rel(glbe::propagator(TransportProblem(FreePathModel::gamma(2.0), 3, 0.5), 2.0), 0.5, 1e-14);
    const double j0_zero = 2.404825557695773;
    EXPECT_NEAR(glbe::propagator(TransportProblem(FreePathModel::pearson(), 2, 0.5), j0_zero), 0.0, 1e-13);
}

TEST(Propagator, NormalizedAtOriginAllDimensions) {
    for (const auto& m : all_models()) {
        for (double d : {1.0, 2.0, 3.0, 4.0, 5.0}) {
            SCOPED_TRACE(m.spec() + " d=" + std::to_string(d));
            const TransportProblem p(m, d, 0.5);
            EXPECT_NEAR(glbe::propagator(p, 0.0), 1.0, 1e-9);
            if (m.has_mean_square_extinction()) {
                EXPECT_NEAR(glbe::stretched_propagator(p, 0.0), 1.0, 1e-9);
            }
        }
    }
}

TEST(Propagator, BoundedByOne) {
    for (const auto& m : all_models()) {
        for (double d : {1.0, 2.0, 3.0}) {
            const TransportProblem p(m, d, 0.5);
            for (double z : {0.3, 1.0, 3.0, 10.0}) EXPECT_LE(std::abs(glbe::propagator(p, z)), 1.0 + 1e-12);
        }
    }
}

// Closed forms against the oscillatory forward transform of p(r)/Omega_d(r).
TEST(Propagator, ClosedFormsMatchForwardTransform) {
    std::vector<FreePathModel> tabulated = {FreePathModel::exponential(), FreePathModel::gamma(2.0),
                                            FreePathModel::gamma(3.0), FreePathModel::gamma(0.5),
                                            FreePathModel::chi(3.0), FreePathModel::bessel_k(2.0)};
    for (const auto& m : tabulated) {
        for (double d : {1.0, 2.0, 3.0, 4.0, 5.0}) {
            const TransportProblem p(m, d, 0.5);
            glbe::RadialFunction f{[&](double r) { return r == 0.0 ? 0.0 : m.pdf(r) / glbe::omega(d, r); },
                                   glbe::Decay::exponential, std::numeric_limits<double>::infinity(), {}};
            for (double z : {0.25, 1.0, 4.0}) {
                SCOPED_TRACE(m.spec() + " d=" + std::to_string(d) + " z=" + std::to_string(z));
                const double quad = glbe::forward_ft(f, d, z).value;
                EXPECT_NEAR(glbe::propagator(p, z), quad, 1e-7 * std::max(1.0, std::abs(quad)));
            }
        }
    }
}

TEST(Propagator, CurvatureGivesMeanSquare) {
    for (const auto& m : all_models()) {
        // k = 2.5 carries a |z|^3 term, so the curvature is only defined to first order.
        if (m.family() == glbe::Family::beta_prime && m.parameter() < 4.0) continue;
        for (double d : {1.0, 2.0, 3.0, 4.0}) {
            SCOPED_TRACE(m.spec() + " d=" + std::to_string(d));
            const TransportProblem p(m, d, 0.5);
            auto second = [&](double h) { return 2.0 * (glbe::propagator(p, h) - 1.0) / (h * h); };
            const double reach = m.divergence_abscissa();
            const double h = reach > 0.0 ? 0.02 * std::min(1.0, reach) : 0.02;
            const double curvature = (4.0 * second(h / 2) - second(h)) / 3.0;
            const double tol = m.family() == glbe::Family::beta_prime ? 1e-5 : 1e-7;
            expect_rel(-curvature * d, m.mean_square(), tol);
        }
    }
}

TEST(PropagatorImag, Examples) {
    const auto e = FreePathModel::exponential();
    expect_rel(glbe::propagator_imag(TransportProblem(e, 1, 0.5), 0.5), 4.0 / 3.0, 1e-14);
    expect_rel(glbe::propagator_imag(TransportProblem(e, 2, 0.5), 0.6), 1.25, 1e-14);
    expect_rel(glbe::propagator_imag(TransportProblem(FreePathModel::pearson(), 1, 0.5), 1.0), std::cosh(1.0), 1e-14);
}

TEST(PropagatorImag, IncreasingAndGuardedAtAbscissa) {
    const TransportProblem p(FreePathModel::gamma(2.0), 3, 0.5);
    double prev = 1.0;
    for (double chi = 0.1; chi < 2.0; chi += 0.2) {
        const double v = glbe::propagator_imag(p, chi);
        EXPECT_GE(v, prev);
        prev = v;
    }
    EXPECT_THROW(glbe::propagator_imag(p, 2.0), glbe::DomainError);
    EXPECT_THROW(glbe::propagator_imag(TransportProblem(FreePathModel::exponential(), 3, 0.5), 1.5),
                 glbe::DomainError);
}

TEST(PropagatorImag, ClosedFormMatchesQuadrature) {
    for (const auto& m : {FreePathModel::exponential(), FreePathModel::gamma(3.0), FreePathModel::chi(2.0)}) {
        for (double d : {1.0, 2.0, 3.0, 4.0}) {
            const TransportProblem p(m, d, 0.5);
            for (double chi : {0.2, 0.5, 0.8}) {
                SCOPED_TRACE(m.spec() + " d=" + std::to_string(d));
                const double quad = simpson_to_infinity(
                    [&](double r) { return m.pdf(r) * glbe::kernel_lambda_imag(d, chi * r); }, 1e-13);
                expect_rel(glbe::propagator_imag(p, chi), quad, 1e-8);
            }
        }
    }
}

TEST(StretchedPropagator, Examples) {
    expect_rel(glbe::stretched_propagator(TransportProblem(FreePathModel::exponential(), 3, 0.5), 1.0),
               std::numbers::pi / 4.0, 1e-14);
    const double z = std::numbers::pi;
    expect_rel(glbe::stretched_propagator(TransportProblem(FreePathModel::pearson(), 3, 0.5), z),
               glbe::sf::sine_integral(z) / z, 1e-12);
    expect_rel(glbe::sf::sine_integral(z) / z, 0.5894898722, 1e-9);
}

TEST(StretchedPropagator, MatchesForwardTransformOfExtinction) {
    for (const auto& m : {FreePathModel::gamma(2.0), FreePathModel::gamma(0.5), FreePathModel::chi(3.0),
                          FreePathModel::bessel_k(3.0)}) {
        for (double d : {1.0, 2.0, 3.0}) {
            const TransportProblem p(m, d, 0.5);
            glbe::RadialFunction f{[&](double r) { return r == 0.0 ? 0.0 : m.extinction(r) / glbe::omega(d, r); },
                                   glbe::Decay::exponential, std::numeric_limits<double>::infinity(), {}};
            for (double z : {0.5, 2.0}) {
                SCOPED_TRACE(m.spec() + " d=" + std::to_string(d));
                const double quad = glbe::forward_ft(f, d, z).value;
                EXPECT_NEAR(glbe::stretched_propagator(p, z), quad, 1e-7);
            }
        }
    }
}
