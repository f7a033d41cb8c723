#ifndef GAUSSDIV_MODELS_HPP
#define GAUSSDIV_MODELS_HPP

// Phase-insensitive processes built from local rates (eps_t, mu_t):
//   X_t = e^{E(t)} 1,  Y_t = e^{2 E(t)} I(t) 1,
//   E(t) = int_0^t eps,  I(t) = int_0^t mu_r e^{-2 E(r)} dr,
// plus the damping and quantum Brownian motion families, global physicality
// and quantum-limit diagnostics.

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "gaussdiv/process.hpp"
#include "gaussdiv/quadrature.hpp"

namespace gaussdiv {

struct RateSegment {
    double t0;
    double t1;
    double eps;
    double mu;
};

/// Rate functions on [0, T] with cached cumulative integrals E, I and
/// K(t) = int_0^t eps_r e^{-2 E(r)} dr. Cheap to copy (shared, immutable state).
class RateProfile {
public:
    using RateFn = std::function<double(double)>;

    /// Callable rates; `breakpoints` marks discontinuities so quadrature panels never straddle them.
    RateProfile(RateFn eps, RateFn mu, double horizon, std::vector<double> breakpoints = {},
                int panels = 256);

    /// Piecewise-constant rates; segments must tile [0, T] in order.
    static RateProfile piecewise(std::vector<RateSegment> segments, int panels = 256);

    double eps(double t) const;
    double mu(double t) const;
    double horizon() const noexcept;
    std::span<const double> breakpoints() const noexcept;

    double integrated_eps(double t) const;   ///< E(t)
    double weighted_noise(double t) const;   ///< I(t)
    double weighted_eps(double t) const;     ///< K(t) = (1 - e^{-2E(t)}) / 2 analytically

private:
    struct State;
    std::shared_ptr<const State> state_;
};

/// Analytic rate-generated process with exact derivative evaluator.
GaussianProcess phase_insensitive_process(const RateProfile & rates, Eigen::Index modes = 1);

/// eps = -gamma, mu = 2 gamma nu_inf: Y_t = nu_inf (1 - e^{-2 gamma t}) 1.
RateProfile damping_rates(double gamma, double nu_inf, double horizon);

struct PhysicalityPoint {
    double t;
    double lambda_plus;    ///< 1/2 + e^{2E}(-1/2 + I)
    double lambda_minus;   ///< -1/2 + e^{2E}(1/2 + I)
    double integral_plus;  ///< int_0^t e^{-2E}(mu - eps), same sign as lambda_plus
    double integral_minus; ///< int_0^t e^{-2E}(mu + eps), same sign as lambda_minus
};

PhysicalityPoint physicality_eigenvalues(const RateProfile & rates, double t);

inline constexpr double kPhysicalityTol = 1e-8;

struct PhysicalityReport {
    bool physical;
    std::optional<double> violation_time;      ///< bisected to ~1e-12 T
    std::optional<double> grid_violation_time; ///< first violating grid node
    std::vector<PhysicalityPoint> table;       ///< at t_i = (i + 1) T / n
};

/// Global complete positivity of the rate-generated map at every grid node.
PhysicalityReport is_physical(const RateProfile & rates, int grid = 400, double tol = kPhysicalityTol);

struct VarianceProduct {
    double value;          ///< <q^2><p^2> = e^{4E}(nu + I)^2
    bool violates_uncertainty;
};

/// Canonical variance product at time t for a thermal input diag(nu, nu).
VarianceProduct canonical_variance_product(const RateProfile & rates, double nu, double t);

struct AmplificationWindow {
    double t_start;
    double t_end;
    double max_gap; ///< max (eps - mu) over the window
};

/// Maximal intervals with eps_t > 0 and 0 <= mu_t < eps_t (gain with less
/// added noise than the quantum limit), found on the sample grid and
/// refined by bisection.
std::vector<AmplificationWindow> amplification_windows(const RateProfile & rates, int grid = 400);

// ---------------------------------------------------------------------------
// Quantum Brownian motion, secular weak-coupling coefficients for an Ohmic
// bath J(w) = w e^{-w / w_c}.

struct QbmParams {
    double omega0 = 1.0;
    double omega_c = 0.5;
    double alpha = 0.5;
    double temperature = 0.0;
    double horizon = 30.0;
};

struct QbmCoefficients {
    double diffusion; ///< Delta_t
    double damping;   ///< gamma_t
};

/// int_0^inf J(w) coth(w / 2T) cos(w s) dw (coth -> 1 at T = 0).
double qbm_noise_kernel(const QbmParams & p, double s);
/// int_0^inf J(w) sin(w s) dw.
double qbm_dissipation_kernel(const QbmParams & p, double s);

/// Delta_t = alpha^2 int_0^t cos(w0 s) noise(s) ds, gamma_t = alpha^2 int_0^t sin(w0 s) dissipation(s) ds.
QbmCoefficients qbm_coefficients(const QbmParams & p, double t);

/// eps_t = -gamma_t, mu_t = Delta_t, with cached coefficient integrals.
RateProfile qbm_rates(const QbmParams & p);

GaussianProcess qbm_process(const QbmParams & p);

} // namespace gaussdiv

#endif // GAUSSDIV_MODELS_HPP
