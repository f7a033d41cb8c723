#include "gaussdiv/process.hpp"

#include <memory>
#include <sstream>

#include <unsupported/Eigen/Splines>

namespace gaussdiv {

GaussianProcess::GaussianProcess(Eigen::Index modes, double horizon, MapFn map, DerivativeFn derivative,
                                 ProcessKind kind)
    : modes_(modes), horizon_(horizon), map_(std::move(map)), derivative_(std::move(derivative)), kind_(kind)
{
    if (modes < 1)
        throw InvalidArgument("GaussianProcess: mode count must be >= 1");
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw InvalidArgument("GaussianProcess: horizon must be positive and finite");
    if (!map_)
        throw InvalidArgument("GaussianProcess: missing map evaluator");
    const GaussianMap<double> start = map_(0.0);
    if (start.modes() != modes)
        throw InvalidArgument("GaussianProcess: evaluator returns maps of the wrong size");
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2 * modes, 2 * modes);
    if (detail::max_abs(start.x() - id) > 1e-9 || detail::max_abs(start.y()) > 1e-9)
        throw InvalidArgument("GaussianProcess: process must start at the identity map");
}

void GaussianProcess::check_time(double t) const
{
    if (!(t >= 0.0 && t <= horizon_ * (1.0 + 1e-12))) {
        std::ostringstream msg;
        msg << "GaussianProcess: t = " << t << " outside [0, " << horizon_ << "]";
        throw InvalidArgument(msg.str());
    }
}

GaussianMap<double> GaussianProcess::at(double t) const
{
    check_time(t);
    return map_(std::min(t, horizon_));
}

std::optional<MapDerivative> GaussianProcess::derivative_at(double t) const
{
    if (!derivative_)
        return std::nullopt;
    check_time(t);
    return derivative_(std::min(t, horizon_));
}

GaussianProcess GaussianProcess::without_derivative() const
{
    return GaussianProcess(modes_, horizon_, map_, {}, kind_);
}

namespace {

using Spline = Eigen::Spline<double, 1, 3>;

// One scalar cubic per flattened entry of X then Y.
struct TabulatedData {
    std::vector<Spline> splines;
    double span;
    Eigen::Index dim; // 2n

    Eigen::VectorXd value(double u) const
    {
        Eigen::VectorXd v(static_cast<Eigen::Index>(splines.size()));
        for (std::size_t k = 0; k < splines.size(); ++k)
            v(static_cast<Eigen::Index>(k)) = splines[k](u)(0);
        return v;
    }

    Eigen::VectorXd slope(double u) const
    {
        Eigen::VectorXd v(static_cast<Eigen::Index>(splines.size()));
        for (std::size_t k = 0; k < splines.size(); ++k)
            v(static_cast<Eigen::Index>(k)) = splines[k].derivatives(u, 1)(0, 1) / span;
        return v;
    }
};

Eigen::MatrixXd unflatten(const Eigen::VectorXd & v, Eigen::Index offset, Eigen::Index dim)
{
    Eigen::MatrixXd m(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j)
            m(i, j) = v(offset + i * dim + j);
    return m;
}

} // namespace

GaussianProcess tabulated_process(std::vector<double> times, const std::vector<Eigen::MatrixXd> & xs,
                                  const std::vector<Eigen::MatrixXd> & ys)
{
    const std::size_t count = times.size();
    if (count < 4)
        throw InvalidArgument("tabulated_process: need at least 4 time points for a cubic spline");
    if (xs.size() != count || ys.size() != count)
        throw InvalidArgument("tabulated_process: times, X and Y lengths differ");
    if (times.front() != 0.0)
        throw InvalidArgument("tabulated_process: first time must be 0");
    for (std::size_t i = 1; i < count; ++i)
        if (!(times[i] > times[i - 1]))
            throw InvalidArgument("tabulated_process: times must be strictly increasing");

    const Eigen::Index dim = xs.front().rows();
    detail::mode_count(dim, "tabulated_process");
    const Eigen::Index block = dim * dim;
    Eigen::MatrixXd points(2 * block, static_cast<Eigen::Index>(count));
    Eigen::RowVectorXd knots(static_cast<Eigen::Index>(count));
    const double span = times.back();
    for (std::size_t c = 0; c < count; ++c) {
        if (xs[c].rows() != dim || xs[c].cols() != dim || ys[c].rows() != dim || ys[c].cols() != dim)
            throw InvalidArgument("tabulated_process: inconsistent matrix sizes");
        const auto col = static_cast<Eigen::Index>(c);
        for (Eigen::Index i = 0; i < dim; ++i)
            for (Eigen::Index j = 0; j < dim; ++j) {
                points(i * dim + j, col) = xs[c](i, j);
                points(block + i * dim + j, col) = ys[c](i, j);
            }
        knots(col) = times[c] / span;
    }

    std::vector<Spline> splines;
    splines.reserve(static_cast<std::size_t>(points.rows()));
    for (Eigen::Index r = 0; r < points.rows(); ++r)
        splines.push_back(Eigen::SplineFitting<Spline>::Interpolate(points.row(r), 3, knots));
    auto data = std::make_shared<const TabulatedData>(TabulatedData{std::move(splines), span, dim});

    auto map = [data](double t) {
        const Eigen::VectorXd v = data->value(t / data->span);
        return make_map<double>(unflatten(v, 0, data->dim), unflatten(v, data->dim * data->dim, data->dim));
    };
    auto derivative = [data](double t) {
        const Eigen::VectorXd v = data->slope(t / data->span);
        MapDerivative out{unflatten(v, 0, data->dim), unflatten(v, data->dim * data->dim, data->dim)};
        out.dy = 0.5 * (out.dy + out.dy.transpose());
        return out;
    };
    return GaussianProcess(dim / 2, span, map, derivative, ProcessKind::tabulated);
}

} // namespace gaussdiv
