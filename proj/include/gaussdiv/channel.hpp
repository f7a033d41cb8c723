#ifndef GAUSSDIV_CHANNEL_HPP
#define GAUSSDIV_CHANNEL_HPP

// Gaussian maps (X, Y): sigma -> X sigma X^T + Y, D -> X D.
// Complete positivity, one-mode positivity and a k-positivity falsifier.

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gaussdiv/symplectic.hpp"

namespace gaussdiv {

template <typename Scalar = double>
class GaussianMap {
public:
    GaussianMap(MatrixX<Scalar> x, MatrixX<Scalar> y)
        : x_(std::move(x)), y_(std::move(y))
    {
        detail::mode_count(x_.rows(), "GaussianMap");
        if (x_.rows() != x_.cols() || y_.rows() != x_.rows() || y_.cols() != x_.cols())
            throw InvalidArgument("GaussianMap: X and Y must be square and of equal size");
        if (!x_.allFinite() || !y_.allFinite())
            throw InvalidArgument("GaussianMap: non-finite entry");
        if (detail::max_abs(y_ - y_.transpose()) > Scalar(1e-10))
            throw InvalidArgument("GaussianMap: Y is not symmetric");
    }

    static GaussianMap identity(Eigen::Index n)
    {
        return {MatrixX<Scalar>::Identity(2 * n, 2 * n), MatrixX<Scalar>::Zero(2 * n, 2 * n)};
    }

    const MatrixX<Scalar> & x() const noexcept { return x_; }
    const MatrixX<Scalar> & y() const noexcept { return y_; }
    Eigen::Index modes() const noexcept { return x_.rows() / 2; }

private:
    MatrixX<Scalar> x_;
    MatrixX<Scalar> y_;
};

/// Symmetrize Y before building a map; for values produced by arithmetic that
/// is symmetric only up to rounding.
template <typename Scalar>
GaussianMap<Scalar> make_map(MatrixX<Scalar> x, const MatrixX<Scalar> & y)
{
    return {std::move(x), MatrixX<Scalar>(Scalar(0.5) * (y + y.transpose()))};
}

// Common one-mode channels (phase-insensitive unless noted).

template <typename Scalar = double>
GaussianMap<Scalar> attenuator(Scalar eta, Eigen::Index n = 1)
{
    const auto id = MatrixX<Scalar>::Identity(2 * n, 2 * n);
    return {std::sqrt(eta) * id, Scalar(0.5) * (Scalar(1) - eta) * id};
}

template <typename Scalar = double>
GaussianMap<Scalar> amplifier(Scalar gain, Scalar added_noise, Eigen::Index n = 1)
{
    const auto id = MatrixX<Scalar>::Identity(2 * n, 2 * n);
    return {gain * id, added_noise * id};
}

/// Phase-space reflection p -> -p: positive but not completely positive.
template <typename Scalar = double>
GaussianMap<Scalar> transposition()
{
    MatrixX<Scalar> x = MatrixX<Scalar>::Identity(2, 2);
    x(1, 1) = Scalar(-1);
    return {x, MatrixX<Scalar>::Zero(2, 2)};
}

/// D' = X D, sigma' = X sigma X^T + Y. The output is not checked for validity.
template <typename Scalar>
GaussianState<Scalar> apply(const GaussianMap<Scalar> & map, const GaussianState<Scalar> & state)
{
    if (state.covariance.rows() != map.x().rows() || state.displacement.size() != map.x().rows())
        throw InvalidArgument("apply: state and map dimensions differ");
    MatrixX<Scalar> sigma = map.x() * state.covariance * map.x().transpose() + map.y();
    return {map.x() * state.displacement, Scalar(0.5) * (sigma + sigma.transpose())};
}

/// later o earlier: X = X2 X1, Y = X2 Y1 X2^T + Y2.
template <typename Scalar>
GaussianMap<Scalar> compose(const GaussianMap<Scalar> & later, const GaussianMap<Scalar> & earlier)
{
    if (later.modes() != earlier.modes())
        throw InvalidArgument("compose: mode counts differ");
    return make_map<Scalar>(later.x() * earlier.x(),
                            later.x() * earlier.y() * later.x().transpose() + later.y());
}

/// (X + 1_k, Y + 0_k) with the k ancilla modes appended after the system modes.
template <typename Scalar>
GaussianMap<Scalar> extend(const GaussianMap<Scalar> & map, Eigen::Index k)
{
    if (k < 1)
        throw InvalidArgument("extend: k must be >= 1");
    const Eigen::Index d = map.x().rows();
    const Eigen::Index total = d + 2 * k;
    MatrixX<Scalar> x = MatrixX<Scalar>::Identity(total, total);
    MatrixX<Scalar> y = MatrixX<Scalar>::Zero(total, total);
    x.topLeftCorner(d, d) = map.x();
    y.topLeftCorner(d, d) = map.y();
    return {std::move(x), std::move(y)};
}

template <typename Scalar>
struct CpCheck {
    bool ok;
    Scalar margin;
};

/// Y - (i/2) Omega + (i/2) X Omega X^T; complete positivity iff this is >= 0.
template <typename Scalar>
MatrixX<std::complex<Scalar>> cp_matrix(const GaussianMap<Scalar> & map)
{
    using Complex = std::complex<Scalar>;
    const MatrixX<Scalar> omega = symplectic_form<Scalar>(map.modes());
    const MatrixX<Scalar> rotated = map.x() * omega * map.x().transpose();
    const Complex half_i(0, Scalar(0.5));
    return map.y().template cast<Complex>()
        + half_i * (rotated - omega).template cast<Complex>();
}

template <typename Scalar>
CpCheck<Scalar> is_cp(const GaussianMap<Scalar> & map, Scalar tol = Scalar(kDefaultTol))
{
    const Scalar margin = hermitian_min_eig(cp_matrix(map));
    return {margin >= -tol, margin};
}

/// y - |g^2 - 1| / 2 for a phase-insensitive map X = g 1, Y = y 1.
/// Negative values beat the quantum limit on added noise.
template <typename Scalar>
Scalar quantum_limit_gap(const GaussianMap<Scalar> & map)
{
    const Eigen::Index d = map.x().rows();
    const Scalar g = map.x()(0, 0);
    const Scalar y = map.y()(0, 0);
    const auto id = MatrixX<Scalar>::Identity(d, d);
    if (detail::max_abs(map.x() - g * id) > Scalar(1e-9) || detail::max_abs(map.y() - y * id) > Scalar(1e-9))
        throw InvalidArgument("quantum_limit_gap: map is not phase-insensitive");
    return y - std::abs(g * g - Scalar(1)) / Scalar(2);
}

// ---------------------------------------------------------------------------
// Positivity on Gaussian inputs.

enum class ChannelClass { CP, P_not_CP, NP };

std::string_view to_string(ChannelClass c);

/// Grid for the one-mode positivity scan over S S^T = R(theta) diag(z^2, z^-2) R(theta)^T.
struct ScanSpec {
    int theta_points = 128;   ///< theta in [0, pi)
    int logz_points = 128;    ///< log10 z in [logz_min, 0]
    double logz_min = -6.0;
    int refine_sweeps = 4;    ///< alternating golden-section sweeps around the best cell
    int golden_iterations = 60;
    unsigned threads = 1;
};

struct PositivityScan {
    bool positive;
    double margin;            ///< minimum over the scan
    Eigen::Matrix2d witness;  ///< minimizing S = R(theta) diag(z, 1/z)
    double theta;
    double z;
};

/// Minimum eigenvalue of (1/2) X S S^T X^T + Y - (i/2) Omega for
/// S S^T = R(theta) diag(z^2, z^-2) R(theta)^T, evaluated through the
/// determinant identity so that it stays accurate for z down to 1e-6.
double one_mode_positivity_value(const Eigen::Matrix2d & x, const Eigen::Matrix2d & y,
                                 double theta, double log10_z);

/// Decide positivity of a one-mode map on Gaussian inputs by scanning the
/// Euler-reduced symplectic group (coarse grid then golden-section refinement).
/// Throws SingularMapError when X is singular.
PositivityScan is_positive_one_mode(const GaussianMap<double> & map, double tol = kDefaultTol,
                                    const ScanSpec & scan = {});

/// Covariance of (n_total) modes, all vacuum except a two-mode squeezed pair
/// (mode_a, mode_b) with blocks A = B = cosh(r)/2 1, C = sinh(r)/2 diag(1, -1).
Eigen::MatrixXd two_mode_squeezed_covariance(Eigen::Index n_total, Eigen::Index mode_a,
                                             Eigen::Index mode_b, double r);

/// r in {0.25, 0.5, ..., 5}.
std::vector<double> default_squeezing_grid();

struct FalsifierResult {
    enum class Source { none, two_mode_squeezed, random_pure };

    bool violated = false;
    double margin = 0.0;                    ///< worst min-eigenvalue seen
    Source source = Source::none;           ///< family of the first violating state
    std::optional<Eigen::MatrixXd> witness; ///< first violating (n + k)-mode covariance
};

/// Search for a Gaussian state violating k-positivity of the map: two-mode
/// squeezed pairs (system mode j, ancilla j mod k) over r_grid, then `samples`
/// random pure (n + k)-mode states. "Not violated" is not a proof.
FalsifierResult kpositivity_falsifier(const GaussianMap<double> & map, Eigen::Index k,
                                      std::span<const double> r_grid, int samples,
                                      std::uint64_t seed, double tol = kDefaultTol,
                                      double r_max = 3.0);

/// Monte Carlo search for S violating (1/2) X S S^T X^T + Y >= (i/2) Omega, any n.
FalsifierResult positivity_falsifier(const GaussianMap<double> & map, int samples,
                                     std::uint64_t seed, double tol = kDefaultTol,
                                     double r_max = 3.0);

struct PositivityVerdict {
    ChannelClass klass;
    double cp_margin;
    double p_margin;
    bool falsifier_only;                    ///< n >= 2: P verdict is "no violation found"
    std::optional<Eigen::MatrixXd> witness; ///< symplectic S (n = 1) or violating covariance
};

struct VerdictOptions {
    double tol = kDefaultTol;
    ScanSpec scan{};
    int falsifier_samples = 2000;
    double r_max = 3.0;
    std::uint64_t seed = 0;
};

/// Full CP / P / NP battery for a map of any mode count.
PositivityVerdict classify_channel(const GaussianMap<double> & map, const VerdictOptions & opts = {});

} // namespace gaussdiv

#endif // GAUSSDIV_CHANNEL_HPP
