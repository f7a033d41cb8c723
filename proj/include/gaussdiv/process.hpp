#ifndef GAUSSDIV_PROCESS_HPP
#define GAUSSDIV_PROCESS_HPP

#include <functional>
#include <optional>
#include <vector>

#include "gaussdiv/channel.hpp"

namespace gaussdiv {

/// Time derivatives (dX/dt, dY/dt) of a process at one instant.
struct MapDerivative {
    Eigen::MatrixXd dx;
    Eigen::MatrixXd dy;
};

enum class ProcessKind { analytic, tabulated, rate_generated };

/// A time-parameterized family of Gaussian maps (X_t, Y_t) on [0, horizon],
/// starting at the identity map. Immutable; safe to share across threads as
/// long as the wrapped callables are.
class GaussianProcess {
public:
    using MapFn = std::function<GaussianMap<double>(double)>;
    using DerivativeFn = std::function<MapDerivative(double)>;

    /// `derivative` may be empty, in which case rates use finite differences.
    GaussianProcess(Eigen::Index modes, double horizon, MapFn map, DerivativeFn derivative = {},
                    ProcessKind kind = ProcessKind::analytic);

    GaussianMap<double> at(double t) const;
    std::optional<MapDerivative> derivative_at(double t) const;

    bool has_derivative() const noexcept { return static_cast<bool>(derivative_); }
    Eigen::Index modes() const noexcept { return modes_; }
    double horizon() const noexcept { return horizon_; }
    ProcessKind kind() const noexcept { return kind_; }

    /// Same process with the analytic derivative dropped (forces finite differences).
    GaussianProcess without_derivative() const;

private:
    void check_time(double t) const;

    Eigen::Index modes_;
    double horizon_;
    MapFn map_;
    DerivativeFn derivative_;
    ProcessKind kind_;
};

/// Entrywise cubic spline through tabulated (t_i, X_i, Y_i); t_0 must be 0 and
/// (X_0, Y_0) the identity map. Derivatives come from the spline.
GaussianProcess tabulated_process(std::vector<double> times, const std::vector<Eigen::MatrixXd> & xs,
                                  const std::vector<Eigen::MatrixXd> & ys);

} // namespace gaussdiv

#endif // GAUSSDIV_PROCESS_HPP
