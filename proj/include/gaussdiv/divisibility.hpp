#ifndef GAUSSDIV_DIVISIBILITY_HPP
#define GAUSSDIV_DIVISIBILITY_HPP

// Divisibility of Gaussian processes: intermediate maps, local rates
// (eps, delta, kappa, mu) and the Markovian / weakly / strongly
// non-Markovian classification of one-mode processes.

#include <string_view>
#include <vector>

#include "gaussdiv/process.hpp"

namespace gaussdiv {

using Region = ChannelClass;

enum class ProcessClass { Markovian, WeaklyNonMarkovian, StronglyNonMarkovian };

/// "markovian", "weak", "strong".
std::string_view to_string(ProcessClass c);

/// First-order invariants of the intermediate map at time t.
/// delta and kappa are det and trace of the generator Ydot - Xdot X^-1 Y - (Xdot X^-1 Y)^T.
struct LocalRates {
    double t;
    double eps;
    double delta;
    double kappa;
    double mu;
};

struct RateSample {
    LocalRates rates;
    Region region;
};

struct Crossing {
    double t;
    Region from;
    Region to;
};

struct DivisibilityReport {
    std::vector<RateSample> samples; ///< also the trajectory (eps_t, mu_t)
    std::vector<Crossing> crossings;
    ProcessClass klass;
};

inline constexpr double kDefaultMargin = 1e-6;
inline constexpr double kDefaultDeltaTol = 1e-12;

struct ClassifyOptions {
    int grid = 400;
    double margin = kDefaultMargin;
    double fd_step = 1e-4;
    double delta_tol = kDefaultDeltaTol;
    unsigned threads = 1;
};

/// (X_{t+tau} X_t^-1, Y_{t+tau} - X_tau Y_t X_tau^T). Throws SingularMapError if X_t is singular.
GaussianMap<double> intermediate_map(const GaussianProcess & proc, double t, double tau);

/// mu = sgn(kappa) sqrt(delta) for delta >= 0, -sqrt(|delta|) otherwise; |delta| <= delta_tol gives 0.
double signed_rate(double delta, double kappa, double delta_tol = kDefaultDeltaTol);

/// Rates of a one-mode process at t in (0, T). Uses the process derivative
/// when available, central differences with step fd_step otherwise.
LocalRates local_rates(const GaussianProcess & proc, double t, double fd_step = 1e-4,
                       double delta_tol = kDefaultDeltaTol);

/// CP if mu >= |eps| - margin; P_not_CP if 2 mu >= |eps| - eps - margin; NP otherwise.
Region classify_point(double eps, double mu, double margin = kDefaultMargin);

/// Euclidean distance from (eps, mu) to the CP boundary mu = |eps|.
double cp_boundary_distance(double eps, double mu);
/// Euclidean distance from (eps, mu) to the P boundary 2 mu = |eps| - eps.
double p_boundary_distance(double eps, double mu);

/// Cell midpoints (i + 1/2) T / n, i = 0 .. n-1; strictly inside (0, T).
std::vector<double> sample_times(double horizon, int n);

/// Rates and region labels on the sample grid, crossings located by
/// bisection to T / (100 n), and the three-class verdict.
DivisibilityReport classify_process(const GaussianProcess & proc, const ClassifyOptions & opts = {});

/// The sampled path Gamma = {(eps_t, mu_t)} with delta, kappa and region.
std::vector<RateSample> trajectory(const GaussianProcess & proc, const ClassifyOptions & opts = {});

/// Complete positivity of the intermediate map (t, t + tau); any mode count.
CpCheck<double> check_intermediate_cp(const GaussianProcess & proc, double t, double tau,
                                      double tol = kDefaultTol);

/// Positivity scan of the one-mode intermediate map (t, t + tau).
PositivityScan check_intermediate_p_one_mode(const GaussianProcess & proc, double t, double tau,
                                             double tol = kDefaultTol, const ScanSpec & scan = {});

} // namespace gaussdiv

#endif // GAUSSDIV_DIVISIBILITY_HPP
