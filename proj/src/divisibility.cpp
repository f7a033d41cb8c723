#include "gaussdiv/divisibility.hpp"

#include <cmath>
#include <exception>
#include <numbers>
#include <sstream>

#include "gaussdiv/parallel.hpp"

namespace gaussdiv {

std::string_view to_string(ProcessClass c)
{
    switch (c) {
    case ProcessClass::Markovian: return "markovian";
    case ProcessClass::WeaklyNonMarkovian: return "weak";
    case ProcessClass::StronglyNonMarkovian: return "strong";
    }
    return "?";
}

namespace {

bool is_singular(const Eigen::MatrixXd & x)
{
    const double scale = std::max(1.0, std::pow(detail::max_abs(x), static_cast<double>(x.rows())));
    return std::abs(x.determinant()) <= 1e-12 * scale;
}

[[noreturn]] void throw_singular(const char * who, double t)
{
    std::ostringstream msg;
    msg << who << ": X_t is singular at t = " << t;
    throw SingularMapError(msg.str(), t);
}

double ray_distance(double px, double py, double dx, double dy)
{
    const double norm = std::hypot(dx, dy);
    dx /= norm;
    dy /= norm;
    const double proj = std::max(0.0, px * dx + py * dy);
    return std::hypot(px - proj * dx, py - proj * dy);
}

} // namespace

GaussianMap<double> intermediate_map(const GaussianProcess & proc, double t, double tau)
{
    if (!(t >= 0.0) || !(tau >= 0.0) || t + tau > proc.horizon() * (1.0 + 1e-12))
        throw InvalidArgument("intermediate_map: need 0 <= t and t + tau <= T");
    if (tau == 0.0) {
        const GaussianMap<double> now = proc.at(t);
        if (is_singular(now.x()))
            throw_singular("intermediate_map", t);
        return GaussianMap<double>::identity(proc.modes());
    }
    const GaussianMap<double> now = proc.at(t);
    const GaussianMap<double> later = proc.at(std::min(t + tau, proc.horizon()));
    if (is_singular(now.x()))
        throw_singular("intermediate_map", t);
    // X_tau = X_{t+tau} X_t^-1, via X_t^T X_tau^T = X_{t+tau}^T.
    const Eigen::MatrixXd x_tau =
        now.x().transpose().partialPivLu().solve(later.x().transpose()).transpose();
    const Eigen::MatrixXd y_tau = later.y() - x_tau * now.y() * x_tau.transpose();
    return make_map<double>(x_tau, y_tau);
}

double signed_rate(double delta, double kappa, double delta_tol)
{
    if (std::abs(delta) <= delta_tol)
        return 0.0;
    if (delta > 0.0)
        return std::copysign(std::sqrt(delta), kappa);
    return -std::sqrt(-delta);
}

LocalRates local_rates(const GaussianProcess & proc, double t, double fd_step, double delta_tol)
{
    if (proc.modes() != 1)
        throw InvalidArgument("local_rates: rates are defined for one-mode processes only");
    if (!(t > 0.0 && t < proc.horizon())) {
        std::ostringstream msg;
        msg << "local_rates: t = " << t << " outside (0, " << proc.horizon() << ")";
        throw InvalidArgument(msg.str());
    }
    const GaussianMap<double> now = proc.at(t);
    if (is_singular(now.x()))
        throw_singular("local_rates", t);

    Eigen::Matrix2d dx;
    Eigen::Matrix2d dy;
    if (auto d = proc.derivative_at(t)) {
        dx = d->dx;
        dy = d->dy;
    } else {
        if (!(fd_step > 0.0))
            throw InvalidArgument("local_rates: finite-difference step must be positive");
        const double h = std::min({fd_step, t, proc.horizon() - t});
        const GaussianMap<double> ahead = proc.at(t + h);
        const GaussianMap<double> behind = proc.at(t - h);
        dx = (ahead.x() - behind.x()) / (2.0 * h);
        dy = (ahead.y() - behind.y()) / (2.0 * h);
    }

    const Eigen::Matrix2d x = now.x();
    const Eigen::Matrix2d y = now.y();
    const Eigen::Matrix2d x_inv = x.inverse();
    const Eigen::Matrix2d flow = dx * x_inv * y;
    Eigen::Matrix2d generator = dy - flow - flow.transpose();
    generator = 0.5 * (generator + generator.transpose());

    LocalRates rates;
    rates.t = t;
    rates.eps = 0.5 * (x_inv * dx).trace();
    rates.delta = generator.determinant();
    rates.kappa = generator.trace();
    rates.mu = signed_rate(rates.delta, rates.kappa, delta_tol);
    return rates;
}

Region classify_point(double eps, double mu, double margin)
{
    if (mu >= std::abs(eps) - margin)
        return Region::CP;
    if (2.0 * mu >= std::abs(eps) - eps - margin)
        return Region::P_not_CP;
    return Region::NP;
}

double cp_boundary_distance(double eps, double mu)
{
    return std::min(ray_distance(eps, mu, 1.0, 1.0), ray_distance(eps, mu, -1.0, 1.0));
}

double p_boundary_distance(double eps, double mu)
{
    return std::min(ray_distance(eps, mu, 1.0, 0.0), ray_distance(eps, mu, -1.0, 1.0));
}

std::vector<double> sample_times(double horizon, int n)
{
    if (n < 2)
        throw InvalidArgument("sample_times: grid needs at least 2 points");
    std::vector<double> times(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        times[static_cast<std::size_t>(i)] = horizon * (i + 0.5) / n;
    return times;
}

namespace {

// A real eigenvalue <= 0 of X_b X_a^-1 means the path from X_a to X_b went through a singular X.
bool step_crosses_singular(const Eigen::MatrixXd & xa, const Eigen::MatrixXd & xb)
{
    const Eigen::MatrixXd step = xa.transpose().partialPivLu().solve(xb.transpose()).transpose();
    const Eigen::VectorXcd ev = step.eigenvalues();
    for (Eigen::Index k = 0; k < ev.size(); ++k)
        if (std::abs(ev(k).imag()) <= 1e-12 * std::abs(ev(k)) && ev(k).real() <= 0.0)
            return true;
    return false;
}

std::vector<RateSample> sample_rates(const GaussianProcess & proc, const ClassifyOptions & opts)
{
    if (proc.modes() != 1)
        throw InvalidArgument("classify_process: rate-based classification needs a one-mode process");
    const std::vector<double> times = sample_times(proc.horizon(), opts.grid);
    std::vector<RateSample> samples(times.size());
    std::vector<std::exception_ptr> errors(times.size());
    std::vector<Eigen::MatrixXd> xs(times.size());
    parallel_for(times.size(), opts.threads, [&](std::size_t i) {
        try {
            xs[i] = proc.at(times[i]).x();
            const LocalRates r = local_rates(proc, times[i], opts.fd_step, opts.delta_tol);
            samples[i] = {r, classify_point(r.eps, r.mu, opts.margin)};
        } catch (...) {
            errors[i] = std::current_exception();
        }
    });
    const Eigen::MatrixXd start = Eigen::MatrixXd::Identity(2, 2);
    for (std::size_t i = 0; i < times.size(); ++i) {
        // Failures are reported in time order.
        if (errors[i])
            std::rethrow_exception(errors[i]);
        if (step_crosses_singular(i == 0 ? start : xs[i - 1], xs[i])) {
            if (i == 0)
                throw Unsupported("classify_process: X_t leaves the identity component before the first sample");
            throw_singular("classify_process (X_t passes through a singular map)", 0.5 * (times[i - 1] + times[i]));
        }
    }
    return samples;
}

} // namespace

std::vector<RateSample> trajectory(const GaussianProcess & proc, const ClassifyOptions & opts)
{
    return sample_rates(proc, opts);
}

DivisibilityReport classify_process(const GaussianProcess & proc, const ClassifyOptions & opts)
{
    DivisibilityReport report;
    report.samples = sample_rates(proc, opts);

    const double resolution = proc.horizon() / (100.0 * opts.grid);
    auto label_at = [&](double t) {
        const LocalRates r = local_rates(proc, t, opts.fd_step, opts.delta_tol);
        return classify_point(r.eps, r.mu, opts.margin);
    };
    for (std::size_t i = 1; i < report.samples.size(); ++i) {
        const Region from = report.samples[i - 1].region;
        if (report.samples[i].region == from)
            continue;
        double lo = report.samples[i - 1].rates.t;
        double hi = report.samples[i].rates.t;
        Region to = report.samples[i].region;
        while (hi - lo > resolution) {
            const double mid = 0.5 * (lo + hi);
            const Region m = label_at(mid);
            if (m == from) {
                lo = mid;
            } else {
                hi = mid;
                to = m;
            }
        }
        report.crossings.push_back({0.5 * (lo + hi), from, to});
    }

    bool any_np = false;
    bool any_non_cp = false;
    for (const RateSample & s : report.samples) {
        any_np = any_np || s.region == Region::NP;
        any_non_cp = any_non_cp || s.region != Region::CP;
    }
    report.klass = any_np ? ProcessClass::StronglyNonMarkovian
        : any_non_cp      ? ProcessClass::WeaklyNonMarkovian
                          : ProcessClass::Markovian;
    return report;
}

CpCheck<double> check_intermediate_cp(const GaussianProcess & proc, double t, double tau, double tol)
{
    return is_cp(intermediate_map(proc, t, tau), tol);
}

PositivityScan check_intermediate_p_one_mode(const GaussianProcess & proc, double t, double tau, double tol,
                                             const ScanSpec & scan)
{
    return is_positive_one_mode(intermediate_map(proc, t, tau), tol, scan);
}

} // namespace gaussdiv
