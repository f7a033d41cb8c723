#include "gaussdiv/channel.hpp"

#include <array>
#include <limits>
#include <numbers>

#include "gaussdiv/parallel.hpp"

namespace gaussdiv {

std::string_view to_string(ChannelClass c)
{
    switch (c) {
    case ChannelClass::CP: return "CP";
    case ChannelClass::P_not_CP: return "P_not_CP";
    case ChannelClass::NP: return "NP";
    }
    return "?";
}

double one_mode_positivity_value(const Eigen::Matrix2d & x, const Eigen::Matrix2d & y,
                                 double theta, double log10_z)
{
    const double z2 = std::pow(10.0, 2.0 * log10_z);
    const double iz2 = 1.0 / z2;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const Eigen::Vector2d a = x * Eigen::Vector2d(c, s);
    const Eigen::Vector2d b = x * Eigen::Vector2d(-s, c);

    // R = (1/2)(z^2 a a^T + z^-2 b b^T) + Y, the real part of the scanned matrix.
    const double r00 = 0.5 * (z2 * a(0) * a(0) + iz2 * b(0) * b(0)) + y(0, 0);
    const double r11 = 0.5 * (z2 * a(1) * a(1) + iz2 * b(1) * b(1)) + y(1, 1);
    const double r01 = 0.5 * (z2 * a(0) * a(1) + iz2 * b(0) * b(1)) + y(0, 1);

    // det(R - (i/2) Omega) = det R - 1/4, with det R expanded term by term
    // (det P = det(X)^2 / 4, adj P = Omega P Omega^T) to avoid cancellation
    // between entries of size z^-2.
    const Eigen::Vector2d wa(a(1), -a(0));
    const Eigen::Vector2d wb(b(1), -b(0));
    const double det_x = x.determinant();
    const double det = 0.25 * (det_x * det_x - 1.0)
        + 0.5 * (z2 * wa.dot(y * wa) + iz2 * wb.dot(y * wb)) + y.determinant();

    const double half_trace = 0.5 * (r00 + r11);
    const double half_diff = 0.5 * (r00 - r11);
    const double radius = std::sqrt(half_diff * half_diff + r01 * r01 + 0.25);
    if (half_trace > 0.0)
        return det / (half_trace + radius);
    return half_trace - radius;
}

namespace {

Eigen::Matrix2d rotation(double theta)
{
    Eigen::Matrix2d r;
    r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return r;
}

template <typename F>
std::pair<double, double> golden_section_min(F && f, double lo, double hi, int iterations)
{
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - inv_phi * (hi - lo);
    double d = lo + inv_phi * (hi - lo);
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < iterations && hi - lo > 1e-15; ++it) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    return fc < fd ? std::pair{c, fc} : std::pair{d, fd};
}

double min_eig_with_noise(const Eigen::MatrixXd & x, const Eigen::MatrixXd & sigma, const Eigen::MatrixXd & y)
{
    Eigen::MatrixXd out = x * sigma * x.transpose() + y;
    out = 0.5 * (out + out.transpose());
    return hermitian_min_eig(minus_half_i_omega(out));
}

} // namespace

PositivityScan is_positive_one_mode(const GaussianMap<double> & map, double tol, const ScanSpec & scan)
{
    if (map.modes() != 1)
        throw InvalidArgument("is_positive_one_mode: map must act on one mode");
    if (scan.theta_points < 1 || scan.logz_points < 2 || !(scan.logz_min < 0.0))
        throw InvalidArgument("is_positive_one_mode: invalid scan grid");
    const Eigen::Matrix2d x = map.x();
    const Eigen::Matrix2d y = map.y();
    if (std::abs(x.determinant()) <= 1e-12 * std::max(1.0, x.squaredNorm()))
        throw SingularMapError("is_positive_one_mode: X is singular");

    const int nt = scan.theta_points;
    const int nu = scan.logz_points;
    const double dtheta = std::numbers::pi / nt;
    const double du = -scan.logz_min / (nu - 1);
    auto theta_at = [&](int i) { return dtheta * i; };
    auto u_at = [&](int j) { return scan.logz_min + du * j; };

    std::vector<double> values(static_cast<std::size_t>(nt) * nu);
    parallel_for(static_cast<std::size_t>(nt), scan.threads, [&](std::size_t i) {
        for (int j = 0; j < nu; ++j)
            values[i * nu + j] = one_mode_positivity_value(x, y, theta_at(static_cast<int>(i)), u_at(j));
    });
    std::size_t best = 0;
    for (std::size_t k = 1; k < values.size(); ++k)
        if (values[k] < values[best])
            best = k;

    double best_theta = theta_at(static_cast<int>(best / nu));
    double best_u = u_at(static_cast<int>(best % nu));
    double best_value = values[best];

    const double u_lo = std::max(scan.logz_min, best_u - du);
    const double u_hi = std::min(0.0, best_u + du);
    const double t_lo = best_theta - dtheta;
    const double t_hi = best_theta + dtheta;
    for (int sweep = 0; sweep < scan.refine_sweeps; ++sweep) {
        const double u_fixed = best_u;
        auto [t, ft] = golden_section_min(
            [&](double th) { return one_mode_positivity_value(x, y, th, u_fixed); }, t_lo, t_hi,
            scan.golden_iterations);
        if (ft < best_value) {
            best_value = ft;
            best_theta = t;
        }
        const double t_fixed = best_theta;
        auto [u, fu] = golden_section_min(
            [&](double uu) { return one_mode_positivity_value(x, y, t_fixed, uu); }, u_lo, u_hi,
            scan.golden_iterations);
        if (fu < best_value) {
            best_value = fu;
            best_u = u;
        }
    }

    best_theta = std::fmod(best_theta + std::numbers::pi, std::numbers::pi);
    const double z = std::pow(10.0, best_u);
    PositivityScan result;
    result.positive = best_value >= -tol;
    result.margin = best_value;
    result.theta = best_theta;
    result.z = z;
    result.witness = rotation(best_theta) * Eigen::Vector2d(z, 1.0 / z).asDiagonal();
    return result;
}

Eigen::MatrixXd two_mode_squeezed_covariance(Eigen::Index n_total, Eigen::Index mode_a,
                                             Eigen::Index mode_b, double r)
{
    if (mode_a == mode_b || mode_a < 0 || mode_b < 0 || mode_a >= n_total || mode_b >= n_total)
        throw InvalidArgument("two_mode_squeezed_covariance: invalid mode pair");
    if (!(r >= 0.0))
        throw InvalidArgument("two_mode_squeezed_covariance: r must be >= 0");
    Eigen::MatrixXd sigma = 0.5 * Eigen::MatrixXd::Identity(2 * n_total, 2 * n_total);
    const double ch = 0.5 * std::cosh(r);
    const double sh = 0.5 * std::sinh(r);
    const Eigen::Matrix2d lambda = Eigen::Vector2d(1.0, -1.0).asDiagonal();
    sigma.block<2, 2>(2 * mode_a, 2 * mode_a) = ch * Eigen::Matrix2d::Identity();
    sigma.block<2, 2>(2 * mode_b, 2 * mode_b) = ch * Eigen::Matrix2d::Identity();
    sigma.block<2, 2>(2 * mode_a, 2 * mode_b) = sh * lambda;
    sigma.block<2, 2>(2 * mode_b, 2 * mode_a) = sh * lambda;
    return sigma;
}

std::vector<double> default_squeezing_grid()
{
    std::vector<double> grid;
    for (int i = 1; i <= 20; ++i)
        grid.push_back(0.25 * i);
    return grid;
}

FalsifierResult kpositivity_falsifier(const GaussianMap<double> & map, Eigen::Index k,
                                      std::span<const double> r_grid, int samples,
                                      std::uint64_t seed, double tol, double r_max)
{
    const GaussianMap<double> ext = extend(map, k);
    const Eigen::Index n = map.modes();
    const Eigen::Index total = n + k;

    FalsifierResult result;
    result.margin = std::numeric_limits<double>::infinity();
    auto probe = [&](const Eigen::MatrixXd & sigma, FalsifierResult::Source source) {
        const double m = min_eig_with_noise(ext.x(), sigma, ext.y());
        result.margin = std::min(result.margin, m);
        if (m < -tol) {
            result.violated = true;
            result.margin = m;
            result.source = source;
            result.witness = sigma;
            return true;
        }
        return false;
    };

    for (double r : r_grid)
        for (Eigen::Index j = 0; j < n; ++j)
            if (probe(two_mode_squeezed_covariance(total, j, n + j % k, r),
                      FalsifierResult::Source::two_mode_squeezed))
                return result;
    for (int i = 0; i < samples; ++i)
        if (probe(random_pure_covariance(total, r_max, derive_seed(seed, static_cast<std::uint64_t>(i))),
                  FalsifierResult::Source::random_pure))
            return result;
    return result;
}

FalsifierResult positivity_falsifier(const GaussianMap<double> & map, int samples,
                                     std::uint64_t seed, double tol, double r_max)
{
    const Eigen::Index n = map.modes();
    FalsifierResult result;
    result.margin = std::numeric_limits<double>::infinity();
    const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int i = 0; i < samples; ++i) {
        const Eigen::MatrixXd s = random_symplectic(n, r_max, derive_seed(seed, static_cast<std::uint64_t>(i)));
        const Eigen::MatrixXd pure = 0.5 * s * s.transpose();
        const double m = min_eig_with_noise(map.x(), pure, map.y());
        result.margin = std::min(result.margin, m);
        if (m < -tol) {
            result.violated = true;
            result.margin = m;
            result.source = FalsifierResult::Source::random_pure;
            result.witness = s;
            return result;
        }
    }
    return result;
}

PositivityVerdict classify_channel(const GaussianMap<double> & map, const VerdictOptions & opts)
{
    const auto cp = is_cp(map, opts.tol);
    PositivityVerdict verdict{ChannelClass::CP, cp.margin, cp.margin, false, std::nullopt};

    bool positive = true;
    bool singular = false;
    if (map.modes() == 1) {
        try {
            const PositivityScan scan = is_positive_one_mode(map, opts.tol, opts.scan);
            verdict.p_margin = scan.margin;
            positive = scan.positive;
            if (!positive)
                verdict.witness = Eigen::MatrixXd(scan.witness);
        } catch (const SingularMapError &) {
            singular = true;
        }
    }
    if (map.modes() > 1 || singular) {
        const FalsifierResult mc = positivity_falsifier(map, opts.falsifier_samples, opts.seed, opts.tol, opts.r_max);
        verdict.falsifier_only = true;
        verdict.p_margin = mc.margin;
        positive = !mc.violated;
        if (!positive)
            verdict.witness = mc.witness;
    }

    if (cp.ok) {
        verdict.klass = ChannelClass::CP;
        verdict.witness.reset();
    } else if (positive) {
        verdict.klass = ChannelClass::P_not_CP;
        const auto grid = default_squeezing_grid();
        const FalsifierResult ext = kpositivity_falsifier(map, 1, grid, 0, opts.seed, opts.tol, opts.r_max);
        if (ext.violated)
            verdict.witness = ext.witness;
    } else {
        verdict.klass = ChannelClass::NP;
    }
    return verdict;
}

} // namespace gaussdiv
