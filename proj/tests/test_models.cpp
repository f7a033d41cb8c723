#include <doctest.h>

#include <cmath>
#include <random>

#include "gaussdiv/divisibility.hpp"
#include "gaussdiv/models.hpp"

using namespace gaussdiv;

namespace {

RateProfile two_phase(double eps1, double mu1, double horizon)
{
    return RateProfile::piecewise({{0.0, 1.0, 0.0, 1.0}, {1.0, horizon, eps1, mu1}});
}

RateProfile random_piecewise(std::mt19937_64 & rng)
{
    std::uniform_int_distribution<int> count(1, 4);
    std::uniform_real_distribution<double> length(0.2, 1.0);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<RateSegment> segs;
    double t = 0.0;
    for (int i = count(rng); i > 0; --i) {
        const double t1 = t + length(rng);
        segs.push_back({t, t1, u(rng), u(rng) + 0.5});
        t = t1;
    }
    return RateProfile::piecewise(std::move(segs));
}

// Closed-form E, I, K for piecewise-constant rates, segment by segment.
struct Closed {
    double e, i, k;
};

Closed closed_form(const std::vector<RateSegment> & segs, double t)
{
    Closed c{0.0, 0.0, 0.0};
    for (const RateSegment & s : segs) {
        if (t <= s.t0)
            break;
        const double d = std::min(t, s.t1) - s.t0;
        // int_0^d e^{-2(E0 + eps r)} dr
        const double w = s.eps == 0.0 ? d : (1.0 - std::exp(-2.0 * s.eps * d)) / (2.0 * s.eps);
        c.i += s.mu * std::exp(-2.0 * c.e) * w;
        c.k += s.eps * std::exp(-2.0 * c.e) * w;
        c.e += s.eps * d;
    }
    return c;
}

// int_0^inf w e^{-w / wc} coth(w / 2T) cos(w s) dw by brute quadrature over w.
double brute_noise_kernel(const QbmParams & p, double s)
{
    auto f = [&](double w) {
        if (w == 0.0)
            return p.temperature > 0.0 ? 2.0 * p.temperature : 0.0;
        const double c = p.temperature > 0.0 ? 1.0 / std::tanh(w / (2.0 * p.temperature)) : 1.0;
        return w * std::exp(-w / p.omega_c) * c * std::cos(w * s);
    };
    double total = 0.0;
    const double top = 60.0 * p.omega_c;
    const int panels = 400;
    for (int k = 0; k < panels; ++k)
        total += integrate(f, top * k / panels, top * (k + 1) / panels);
    return total;
}

double brute_dissipation_kernel(const QbmParams & p, double s)
{
    auto f = [&](double w) { return w * std::exp(-w / p.omega_c) * std::sin(w * s); };
    double total = 0.0;
    const double top = 60.0 * p.omega_c;
    for (int k = 0; k < 400; ++k)
        total += integrate(f, top * k / 400.0, top * (k + 1) / 400.0);
    return total;
}

} // namespace

TEST_CASE("property: cached integrals match piecewise closed forms")
{
    std::mt19937_64 rng(derive_seed(53, 0));
    for (int trial = 0; trial < 30; ++trial) {
        std::uniform_int_distribution<int> count(1, 4);
        std::uniform_real_distribution<double> length(0.2, 1.5);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        std::vector<RateSegment> segs;
        double t = 0.0;
        for (int i = count(rng); i > 0; --i) {
            const double t1 = t + length(rng);
            segs.push_back({t, t1, u(rng), u(rng)});
            t = t1;
        }
        const RateProfile rates = RateProfile::piecewise(segs);
        std::uniform_real_distribution<double> when(0.0, t);
        for (int j = 0; j < 10; ++j) {
            const double s = when(rng);
            const Closed c = closed_form(segs, s);
            CHECK(rates.integrated_eps(s) == doctest::Approx(c.e).epsilon(1e-12).scale(1.0));
            CHECK(rates.weighted_noise(s) == doctest::Approx(c.i).epsilon(1e-11).scale(1.0));
            CHECK(rates.weighted_eps(s) == doctest::Approx(c.k).epsilon(1e-11).scale(1.0));
            // K(t) = (1 - e^{-2E(t)}) / 2 analytically.
            CHECK(rates.weighted_eps(s) ==
                  doctest::Approx(0.5 * (1.0 - std::exp(-2.0 * rates.integrated_eps(s)))).epsilon(1e-11).scale(1.0));
        }
    }
}

TEST_CASE("piecewise profiles validate their segments")
{
    CHECK_THROWS_AS(RateProfile::piecewise({}), InvalidArgument);
    CHECK_THROWS_AS(RateProfile::piecewise({{0.5, 1.0, 0.0, 1.0}}), InvalidArgument);
    CHECK_THROWS_AS(RateProfile::piecewise({{0.0, 1.0, 0.0, 1.0}, {1.5, 2.0, 0.0, 1.0}}), InvalidArgument);
    CHECK_THROWS_AS(RateProfile::piecewise({{0.0, 0.0, 0.0, 1.0}}), InvalidArgument);
    CHECK_THROWS_AS(RateProfile::piecewise({{0.0, 1.0, NAN, 1.0}}), InvalidArgument);
    const RateProfile r = RateProfile::piecewise({{0.0, 1.0, 0.25, 1.0}, {1.0, 3.0, -0.5, 2.0}});
    CHECK(r.horizon() == 3.0);
    CHECK(r.eps(0.999) == 0.25);
    CHECK(r.eps(1.0) == -0.5);
    CHECK(r.eps(3.0) == -0.5);
    REQUIRE(r.breakpoints().size() == 1);
    CHECK(r.breakpoints()[0] == 1.0);
}

TEST_CASE("phase-insensitive process reproduces input rates")
{
    std::mt19937_64 rng(derive_seed(59, 0));
    for (int trial = 0; trial < 20; ++trial) {
        const RateProfile rates = random_piecewise(rng);
        const GaussianProcess proc = phase_insensitive_process(rates);
        for (const double t : sample_times(rates.horizon(), 40)) {
            const LocalRates r = local_rates(proc, t);
            CHECK(r.eps == doctest::Approx(rates.eps(t)).epsilon(1e-9).scale(1.0));
            CHECK(r.mu == doctest::Approx(rates.mu(t)).epsilon(1e-9).scale(1.0));
        }
    }
    const GaussianProcess two = phase_insensitive_process(damping_rates(1.0, 1.0, 1.0), 2);
    CHECK(two.modes() == 2);
    CHECK(two.at(0.5).x()(3, 3) == doctest::Approx(std::exp(-0.5)));
}

TEST_CASE("damping closed form Y_t = nu (1 - e^{-2 gamma t})")
{
    const GaussianProcess proc = phase_insensitive_process(damping_rates(0.3, 2.0, 5.0));
    for (const double t : {0.1, 1.0, 4.9}) {
        const GaussianMap<double> m = proc.at(t);
        CHECK(m.x()(0, 0) == doctest::Approx(std::exp(-0.3 * t)).epsilon(1e-13));
        CHECK(m.y()(0, 0) == doctest::Approx(2.0 * (1.0 - std::exp(-0.6 * t))).epsilon(1e-12));
        CHECK(m.y()(0, 1) == 0.0);
    }
    CHECK_THROWS_AS(damping_rates(1.0, -0.1, 1.0), InvalidArgument);
}

TEST_CASE("physicality of the two-phase profiles")
{
    // Phase 1: Lambda_+- = t; phase 2 with eps = 1: integral_+ = 1 - (1 - e^{-2(t-1)}) / 2.
    const RateProfile weak = two_phase(1.0, 0.0, 2.0);
    const PhysicalityReport r = is_physical(weak, 400);
    CHECK(r.physical);
    CHECK_FALSE(r.violation_time.has_value());
    REQUIRE(r.table.size() == 400);
    for (const PhysicalityPoint & p : r.table) {
        if (p.t <= 1.0) {
            CHECK(p.lambda_plus == doctest::Approx(p.t).epsilon(1e-12));
            CHECK(p.lambda_minus == doctest::Approx(p.t).epsilon(1e-12));
        } else {
            const double j = 1.0 - (1.0 - std::exp(-2.0 * (p.t - 1.0))) / 2.0;
            CHECK(p.integral_plus == doctest::Approx(j).epsilon(1e-12));
            CHECK(p.lambda_plus == doctest::Approx(std::exp(2.0 * (p.t - 1.0)) * j).epsilon(1e-12));
        }
    }

    // eps = -1 in phase 2: Lambda_- = -1/2 + e^{-2(t-1)} 3/2 vanishes at 1 + ln(3)/2.
    const PhysicalityReport s = is_physical(two_phase(-1.0, 0.0, 1.6), 400);
    CHECK_FALSE(s.physical);
    REQUIRE(s.violation_time.has_value());
    const double root = 1.0 + std::log(3.0) / 2.0;
    // The tolerance shifts the crossing by tol / |dLambda_-/dt| = tol.
    CHECK(*s.violation_time > root);
    CHECK(*s.violation_time - root < 2.0 * kPhysicalityTol);
    const auto exact = is_physical(two_phase(-1.0, 0.0, 1.6), 400, 0.0);
    REQUIRE(exact.violation_time.has_value());
    CHECK(*exact.violation_time == doctest::Approx(root).epsilon(1e-11));
    REQUIRE(s.grid_violation_time.has_value());
    CHECK(*s.grid_violation_time >= *s.violation_time);
    CHECK(*s.grid_violation_time - *s.violation_time <= 1.6 / 400);
    CHECK_THROWS_AS(is_physical(weak, 0), InvalidArgument);
}

TEST_CASE("property: direct eigenvalues and integral conditions agree")
{
    std::mt19937_64 rng(derive_seed(61, 0));
    for (int trial = 0; trial < 30; ++trial) {
        const RateProfile rates = random_piecewise(rng);
        for (const PhysicalityPoint & p : is_physical(rates, 50).table) {
            const double e2 = std::exp(2.0 * rates.integrated_eps(p.t));
            CHECK(p.lambda_plus == doctest::Approx(e2 * p.integral_plus).epsilon(1e-10).scale(1.0));
            CHECK(p.lambda_minus == doctest::Approx(e2 * p.integral_minus).epsilon(1e-10).scale(1.0));
        }
    }
}

TEST_CASE("variance product on the damping border and under noiseless contraction")
{
    const RateProfile border = damping_rates(0.5, 0.5, 20.0);
    const RateProfile contraction = damping_rates(0.5, 0.0, 20.0);
    for (const double t : {0.01, 1.0, 7.5, 20.0}) {
        const auto b = canonical_variance_product(border, 0.5, t);
        CHECK(b.value == doctest::Approx(0.25).epsilon(1e-12));
        CHECK_FALSE(b.violates_uncertainty);
        const auto c = canonical_variance_product(contraction, 0.5, t);
        CHECK(c.value == doctest::Approx(0.25 * std::exp(-2.0 * t)).epsilon(1e-12));
        CHECK(c.violates_uncertainty);
    }
    CHECK(canonical_variance_product(border, 2.0, 1.0).value > 0.25);
    CHECK_THROWS_AS(canonical_variance_product(border, 0.4, 1.0), InvalidArgument);
}

TEST_CASE("amplification windows")
{
    const auto w = amplification_windows(two_phase(1.0, 0.0, 2.0), 400);
    REQUIRE(w.size() == 1);
    CHECK(w[0].t_start == doctest::Approx(1.0).epsilon(2.0 / 40000));
    CHECK(w[0].t_end == 2.0);
    CHECK(w[0].max_gap == doctest::Approx(1.0));

    CHECK(amplification_windows(damping_rates(0.5, 0.5, 5.0), 400).empty());

    // Gain with noise above the quantum limit is not a window; the open window starts at 0.
    const RateProfile r = RateProfile::piecewise(
        {{0.0, 1.0, 0.5, 0.25}, {1.0, 2.0, 0.5, 0.75}, {2.0, 3.0, 1.0, 0.5}, {3.0, 4.0, -1.0, 2.0}});
    const auto many = amplification_windows(r, 400);
    REQUIRE(many.size() == 2);
    CHECK(many[0].t_start == 0.0);
    CHECK(many[0].t_end == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(many[0].max_gap == doctest::Approx(0.25));
    CHECK(many[1].t_start == doctest::Approx(2.0).epsilon(1e-4));
    CHECK(many[1].t_end == doctest::Approx(3.0).epsilon(1e-4));
    CHECK(many[1].max_gap == doctest::Approx(0.5));
}

TEST_CASE("QBM kernels match brute-force frequency integrals")
{
    QbmParams zero;
    QbmParams warm;
    warm.temperature = 0.3;
    for (const double s : {0.0, 0.5, 1.7, 4.0, 11.0}) {
        CHECK(qbm_noise_kernel(zero, s) == doctest::Approx(brute_noise_kernel(zero, s)).epsilon(1e-9).scale(1.0));
        CHECK(qbm_dissipation_kernel(zero, s) ==
              doctest::Approx(brute_dissipation_kernel(zero, s)).epsilon(1e-9).scale(1.0));
        CHECK(qbm_noise_kernel(warm, s) == doctest::Approx(brute_noise_kernel(warm, s)).epsilon(1e-6).scale(1.0));
    }
    // Zero temperature: w_c^2 (1 - w_c^2 s^2) / (1 + w_c^2 s^2)^2.
    const double wc = zero.omega_c;
    const double s = 1.3;
    CHECK(qbm_noise_kernel(zero, s) ==
          doctest::Approx(wc * wc * (1 - wc * wc * s * s) / std::pow(1 + wc * wc * s * s, 2)).epsilon(1e-14));
}

TEST_CASE("QBM coefficients and rates")
{
    const QbmParams p;
    const RateProfile rates = qbm_rates(p);
    for (const double t : {0.3, 2.0, 9.1, 25.0}) {
        const QbmCoefficients c = qbm_coefficients(p, t);
        CHECK(rates.mu(t) == doctest::Approx(c.diffusion).epsilon(1e-10).scale(1.0));
        CHECK(rates.eps(t) == doctest::Approx(-c.damping).epsilon(1e-10).scale(1.0));
    }
    CHECK(qbm_coefficients(p, 0.0).diffusion == 0.0);
    // Early times: Delta ~ alpha^2 w_c^2 t, gamma = O(t^2).
    const double t = 1e-3;
    CHECK(qbm_coefficients(p, t).diffusion ==
          doctest::Approx(p.alpha * p.alpha * p.omega_c * p.omega_c * t).epsilon(1e-3));
    CHECK(std::abs(qbm_coefficients(p, t).damping) < 1e-6);

    QbmParams bad;
    bad.omega_c = 0.0;
    CHECK_THROWS_AS(qbm_rates(bad), InvalidArgument);
    CHECK_THROWS_AS(qbm_coefficients(p, -1.0), InvalidArgument);
}

TEST_CASE("QBM non-Markovianity comes from Delta dropping below gamma")
{
    const QbmParams p;
    const RateProfile rates = qbm_rates(p);
    bool below = false;
    double min_delta = INFINITY;
    for (const double t : sample_times(p.horizon, 600)) {
        const double delta = rates.mu(t);
        const double gamma = -rates.eps(t);
        min_delta = std::min(min_delta, delta);
        below = below || delta < gamma;
    }
    CHECK(below);
    MESSAGE("min Delta over [0, 30]: ", min_delta);
}

TEST_CASE("QBM region labels do not depend on the coupling")
{
    QbmParams a;
    QbmParams b;
    a.alpha = 0.2;
    b.alpha = 0.9;
    ClassifyOptions opts;
    opts.grid = 200;
    opts.margin = 0.0;
    const auto ra = classify_process(qbm_process(a), opts);
    const auto rb = classify_process(qbm_process(b), opts);
    REQUIRE(ra.samples.size() == rb.samples.size());
    int same = 0;
    for (std::size_t i = 0; i < ra.samples.size(); ++i)
        same += ra.samples[i].region == rb.samples[i].region ? 1 : 0;
    CHECK(same >= 198);
    CHECK(ra.klass == rb.klass);
}

TEST_CASE("QBM physicality depends on the coupling")
{
    QbmParams strong;
    strong.alpha = 1.0;
    CHECK_FALSE(is_physical(qbm_rates(strong), 400).physical);
    CHECK(is_physical(qbm_rates(QbmParams{}), 400).physical);
}
