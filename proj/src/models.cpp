#include "gaussdiv/models.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <sstream>

#include "gaussdiv/divisibility.hpp"

namespace gaussdiv {

struct RateProfile::State {
    RateFn eps;
    RateFn mu;
    double horizon = 0.0;
    std::vector<double> breakpoints;
    std::optional<CumulativeIntegral> e;
    std::optional<CumulativeIntegral> i;
    std::optional<CumulativeIntegral> k;
};

RateProfile::RateProfile(RateFn eps, RateFn mu, double horizon, std::vector<double> breakpoints, int panels)
{
    if (!eps || !mu)
        throw InvalidArgument("RateProfile: missing rate function");
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw InvalidArgument("RateProfile: horizon must be positive and finite");
    auto st = std::make_shared<State>();
    st->eps = std::move(eps);
    st->mu = std::move(mu);
    st->horizon = horizon;
    std::sort(breakpoints.begin(), breakpoints.end());
    st->breakpoints = std::move(breakpoints);

    const std::vector<double> nodes = make_nodes(horizon, panels, st->breakpoints);
    const State * raw = st.get();
    st->e.emplace([raw](double t) { return raw->eps(t); }, nodes);
    st->i.emplace([raw](double r) { return raw->mu(r) * std::exp(-2.0 * (*raw->e)(r)); }, nodes);
    st->k.emplace([raw](double r) { return raw->eps(r) * std::exp(-2.0 * (*raw->e)(r)); }, nodes);
    state_ = std::move(st);
}

RateProfile RateProfile::piecewise(std::vector<RateSegment> segments, int panels)
{
    if (segments.empty())
        throw InvalidArgument("RateProfile::piecewise: no segments");
    if (segments.front().t0 != 0.0)
        throw InvalidArgument("RateProfile::piecewise: first segment must start at 0");
    std::vector<double> breaks;
    for (std::size_t s = 0; s < segments.size(); ++s) {
        const RateSegment & seg = segments[s];
        if (!(seg.t1 > seg.t0) || !std::isfinite(seg.t1) || !std::isfinite(seg.eps) || !std::isfinite(seg.mu))
            throw InvalidArgument("RateProfile::piecewise: invalid segment");
        if (s > 0) {
            if (std::abs(seg.t0 - segments[s - 1].t1) > 1e-12 * std::max(1.0, seg.t0))
                throw InvalidArgument("RateProfile::piecewise: segments must be contiguous");
            breaks.push_back(seg.t0);
        }
    }
    auto segs = std::make_shared<const std::vector<RateSegment>>(std::move(segments));
    auto find = [segs](double t) -> const RateSegment & {
        // Segment s covers [t0, t1); the last one also owns its end point.
        auto it = std::upper_bound(segs->begin(), segs->end(), t,
                                   [](double v, const RateSegment & seg) { return v < seg.t0; });
        if (it == segs->begin())
            return segs->front();
        return *std::prev(it);
    };
    const double horizon = segs->back().t1;
    return RateProfile([find](double t) { return find(t).eps; }, [find](double t) { return find(t).mu; },
                       horizon, std::move(breaks), panels);
}

double RateProfile::eps(double t) const { return state_->eps(t); }
double RateProfile::mu(double t) const { return state_->mu(t); }
double RateProfile::horizon() const noexcept { return state_->horizon; }
std::span<const double> RateProfile::breakpoints() const noexcept { return state_->breakpoints; }
double RateProfile::integrated_eps(double t) const { return (*state_->e)(t); }
double RateProfile::weighted_noise(double t) const { return (*state_->i)(t); }
double RateProfile::weighted_eps(double t) const { return (*state_->k)(t); }

GaussianProcess phase_insensitive_process(const RateProfile & rates, Eigen::Index modes)
{
    const Eigen::Index dim = 2 * modes;
    auto map = [rates, dim](double t) {
        const double e = rates.integrated_eps(t);
        const double g = std::exp(e);
        const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(dim, dim);
        return GaussianMap<double>(g * id, (g * g * rates.weighted_noise(t)) * id);
    };
    auto derivative = [rates, dim](double t) {
        const double e = rates.integrated_eps(t);
        const double g = std::exp(e);
        const double eps = rates.eps(t);
        const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(dim, dim);
        return MapDerivative{eps * g * id, (2.0 * eps * g * g * rates.weighted_noise(t) + rates.mu(t)) * id};
    };
    return GaussianProcess(modes, rates.horizon(), map, derivative, ProcessKind::rate_generated);
}

RateProfile damping_rates(double gamma, double nu_inf, double horizon)
{
    if (!(nu_inf >= 0.0))
        throw InvalidArgument("damping_rates: nu_inf must be non-negative");
    return RateProfile::piecewise({{0.0, horizon, -gamma, 2.0 * gamma * nu_inf}});
}

PhysicalityPoint physicality_eigenvalues(const RateProfile & rates, double t)
{
    const double e2 = std::exp(2.0 * rates.integrated_eps(t));
    const double i = rates.weighted_noise(t);
    const double k = rates.weighted_eps(t);
    return {t, 0.5 + e2 * (-0.5 + i), -0.5 + e2 * (0.5 + i), i - k, i + k};
}

PhysicalityReport is_physical(const RateProfile & rates, int grid, double tol)
{
    if (grid < 1)
        throw InvalidArgument("is_physical: grid must be >= 1");
    auto violated = [tol](const PhysicalityPoint & p) {
        return p.lambda_plus < -tol || p.lambda_minus < -tol || p.integral_plus < -tol || p.integral_minus < -tol;
    };
    PhysicalityReport report{true, std::nullopt, std::nullopt, {}};
    report.table.reserve(static_cast<std::size_t>(grid));
    const double horizon = rates.horizon();
    for (int i = 0; i < grid; ++i) {
        const double t = horizon * (i + 1) / grid;
        report.table.push_back(physicality_eigenvalues(rates, t));
        if (report.physical && violated(report.table.back())) {
            report.physical = false;
            report.grid_violation_time = t;
            double lo = horizon * i / grid;
            double hi = t;
            while (hi - lo > 1e-12 * horizon) {
                const double mid = 0.5 * (lo + hi);
                (violated(physicality_eigenvalues(rates, mid)) ? hi : lo) = mid;
            }
            report.violation_time = hi;
        }
    }
    return report;
}

VarianceProduct canonical_variance_product(const RateProfile & rates, double nu, double t)
{
    if (!(nu >= 0.5))
        throw InvalidArgument("canonical_variance_product: nu must be >= 1/2");
    const double value = std::exp(4.0 * rates.integrated_eps(t)) * std::pow(nu + rates.weighted_noise(t), 2);
    return {value, value < 0.25 - 1e-10};
}

std::vector<AmplificationWindow> amplification_windows(const RateProfile & rates, int grid)
{
    const double horizon = rates.horizon();
    const double resolution = horizon / (100.0 * grid);
    auto inside = [&](double t) {
        const double e = rates.eps(t);
        const double m = rates.mu(t);
        return e > 0.0 && m >= 0.0 && m < e;
    };
    auto gap = [&](double t) { return rates.eps(t) - rates.mu(t); };
    // Bisect on `inside` between lo (state `lo_state`) and hi; returns the switch point.
    auto edge = [&](double lo, double hi, bool lo_state, double & max_gap) {
        while (hi - lo > resolution) {
            const double mid = 0.5 * (lo + hi);
            const bool in = inside(mid);
            if (in)
                max_gap = std::max(max_gap, gap(mid));
            (in == lo_state ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };

    std::vector<AmplificationWindow> windows;
    const std::vector<double> times = sample_times(horizon, grid);
    std::optional<AmplificationWindow> open;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const bool in = inside(times[i]);
        if (in && !open) {
            open = AmplificationWindow{0.0, horizon, gap(times[i])};
            if (i > 0)
                open->t_start = edge(times[i - 1], times[i], false, open->max_gap);
        } else if (in) {
            open->max_gap = std::max(open->max_gap, gap(times[i]));
        } else if (open) {
            open->t_end = edge(times[i - 1], times[i], true, open->max_gap);
            windows.push_back(*open);
            open.reset();
        }
    }
    if (open)
        windows.push_back(*open);
    return windows;
}

// ---------------------------------------------------------------------------

namespace {

void check_qbm(const QbmParams & p)
{
    if (!(p.omega0 > 0.0) || !(p.omega_c > 0.0) || !(p.alpha > 0.0) || !(p.temperature >= 0.0) ||
        !(p.horizon > 0.0))
        throw InvalidArgument("QbmParams: omega0, omega_c, alpha, horizon must be positive and T_bath >= 0");
}

// Gauss-Kronrod panels short enough to resolve the cos/sin(w0 s) oscillation.
std::vector<double> qbm_nodes(const QbmParams & p, double horizon)
{
    const double scale = std::max(p.omega0, p.omega_c);
    const int panels = std::max(64, static_cast<int>(std::ceil(horizon * scale * 8.0)));
    return make_nodes(horizon, panels);
}

struct QbmCache {
    CumulativeIntegral diffusion;
    CumulativeIntegral damping;
};

} // namespace

double qbm_noise_kernel(const QbmParams & p, double s)
{
    using C = std::complex<double>;
    const double a = 1.0 / p.omega_c;
    // int_0^inf w e^{-c w} cos(w s) dw = Re 1 / (c - i s)^2
    auto term = [s](double c) { return std::real(1.0 / std::pow(C(c, -s), 2)); };
    double value = term(a);
    if (p.temperature > 0.0) {
        // coth(w / 2T) = 1 + 2 sum_k e^{-k w / T}; tail of the sum by its integral.
        constexpr int terms = 400;
        const double step = 1.0 / p.temperature;
        double sum = 0.0;
        for (int k = 1; k <= terms; ++k)
            sum += term(a + k * step);
        sum += std::real(p.temperature / C(a + (terms + 0.5) * step, -s));
        value += 2.0 * sum;
    }
    return value;
}

double qbm_dissipation_kernel(const QbmParams & p, double s)
{
    const double a = 1.0 / p.omega_c;
    const double d = a * a + s * s;
    return 2.0 * a * s / (d * d);
}

QbmCoefficients qbm_coefficients(const QbmParams & p, double t)
{
    check_qbm(p);
    if (!(t >= 0.0))
        throw InvalidArgument("qbm_coefficients: t must be >= 0");
    if (t == 0.0)
        return {0.0, 0.0};
    const double a2 = p.alpha * p.alpha;
    const std::vector<double> nodes = qbm_nodes(p, t);
    double diffusion = 0.0;
    double damping = 0.0;
    for (std::size_t k = 1; k < nodes.size(); ++k) {
        diffusion += integrate([&](double s) { return std::cos(p.omega0 * s) * qbm_noise_kernel(p, s); },
                               nodes[k - 1], nodes[k]);
        damping += integrate([&](double s) { return std::sin(p.omega0 * s) * qbm_dissipation_kernel(p, s); },
                             nodes[k - 1], nodes[k]);
    }
    return {a2 * diffusion, a2 * damping};
}

RateProfile qbm_rates(const QbmParams & p)
{
    check_qbm(p);
    const double a2 = p.alpha * p.alpha;
    const std::vector<double> nodes = qbm_nodes(p, p.horizon);
    auto cache = std::make_shared<const QbmCache>(QbmCache{
        CumulativeIntegral([p, a2](double s) { return a2 * std::cos(p.omega0 * s) * qbm_noise_kernel(p, s); },
                           nodes),
        CumulativeIntegral([p, a2](double s) { return a2 * std::sin(p.omega0 * s) * qbm_dissipation_kernel(p, s); },
                           nodes)});
    return RateProfile([cache](double t) { return -cache->damping(t); },
                       [cache](double t) { return cache->diffusion(t); }, p.horizon);
}

GaussianProcess qbm_process(const QbmParams & p)
{
    return phase_insensitive_process(qbm_rates(p));
}

} // namespace gaussdiv
