#include "gaussdiv/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gaussdiv/errors.hpp"

namespace gaussdiv {

namespace {

struct Estimate {
    double value;
    double error;
};

// One 15-point panel; Boost reports the error on [-1, 1], hence the rescale.
Estimate panel(const std::function<double(double)> & f, double a, double b)
{
    double error = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, &error);
    return {value, error * std::abs(b - a) / 2.0};
}

Estimate adapt(const std::function<double(double)> & f, double a, double b, Estimate whole, double tol,
               unsigned depth)
{
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(whole.value);
    if (depth == 0 || !std::isfinite(whole.error) || whole.error <= std::max(tol, floor))
        return whole;
    const double mid = 0.5 * (a + b);
    const Estimate left = adapt(f, a, mid, panel(f, a, mid), 0.5 * tol, depth - 1);
    const Estimate right = adapt(f, mid, b, panel(f, mid, b), 0.5 * tol, depth - 1);
    return {left.value + right.value, left.error + right.error};
}

} // namespace

double integrate(const std::function<double(double)> & f, double a, double b, const QuadratureOptions & opts)
{
    if (a == b)
        return 0.0;
    const Estimate first = panel(f, a, b);
    const double tol = std::max(opts.abs_tol, opts.rel_tol * std::abs(first.value));
    const Estimate result = adapt(f, a, b, first, tol, opts.max_depth);
    const double bound = 100.0 * std::max({opts.abs_tol, opts.rel_tol * std::abs(result.value),
                                            64.0 * std::numeric_limits<double>::epsilon() * std::abs(result.value)});
    if (!std::isfinite(result.value) || !(result.error <= bound)) {
        std::ostringstream msg;
        msg << "quadrature did not converge on [" << a << ", " << b << "]: error estimate " << result.error;
        throw NumericalFailure(msg.str());
    }
    return result.value;
}

std::vector<double> make_nodes(double horizon, int panels, std::span<const double> breakpoints)
{
    if (!(horizon > 0.0) || panels < 1)
        throw InvalidArgument("make_nodes: horizon must be positive and panels >= 1");
    std::vector<double> nodes;
    nodes.reserve(static_cast<std::size_t>(panels) + 1 + breakpoints.size());
    for (int i = 0; i <= panels; ++i)
        nodes.push_back(horizon * i / panels);
    for (double b : breakpoints)
        if (b > 0.0 && b < horizon)
            nodes.push_back(b);
    std::sort(nodes.begin(), nodes.end());
    const double eps = 1e-14 * horizon;
    nodes.erase(std::unique(nodes.begin(), nodes.end(), [eps](double l, double r) { return r - l <= eps; }),
                nodes.end());
    nodes.back() = horizon;
    return nodes;
}

CumulativeIntegral::CumulativeIntegral(std::function<double(double)> f, std::vector<double> nodes,
                                       QuadratureOptions opts)
    : f_(std::move(f)), nodes_(std::move(nodes)), opts_(opts)
{
    if (nodes_.size() < 2 || nodes_.front() != 0.0 || !std::is_sorted(nodes_.begin(), nodes_.end()))
        throw InvalidArgument("CumulativeIntegral: nodes must be sorted and start at 0");
    values_.resize(nodes_.size());
    values_[0] = 0.0;
    for (std::size_t k = 1; k < nodes_.size(); ++k)
        values_[k] = values_[k - 1] + integrate(f_, nodes_[k - 1], nodes_[k], opts_);
}

double CumulativeIntegral::operator()(double t) const
{
    const double slack = 1e-12 * nodes_.back();
    if (!(t >= -slack && t <= nodes_.back() + slack)) {
        std::ostringstream msg;
        msg << "CumulativeIntegral: t = " << t << " outside [0, " << nodes_.back() << "]";
        throw InvalidArgument(msg.str());
    }
    t = std::clamp(t, 0.0, nodes_.back());
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
    const std::size_t k = static_cast<std::size_t>(std::distance(nodes_.begin(), it)) - 1;
    if (t == nodes_[k])
        return values_[k];
    return values_[k] + integrate(f_, nodes_[k], t, opts_);
}

} // namespace gaussdiv
