#ifndef GAUSSDIV_ORACLE_HPP
#define GAUSSDIV_ORACLE_HPP

// Brute-force verifiers for the test suites: witness states, seeded random
// maps and the CP <=> 1-positivity equivalence check.

#include <cstdint>
#include <span>

#include "gaussdiv/channel.hpp"

namespace gaussdiv::oracle {

/// Two-mode squeezed vacuum in normal form; pure for every r.
struct WitnessState {
    double r;
    Eigen::Index system_mode;
    Eigen::Index ancilla_mode;
    Eigen::MatrixXd covariance;
};

WitnessState tmsv_witness(double r);

/// X entries uniform in [-spread, spread]; Y = u A^T A with A entries
/// uniform in [-1, 1] and u uniform in [0, 2]. At spread 1.5 and n = 1 the
/// three classes come out in roughly equal numbers.
GaussianMap<double> random_gaussian_map(Eigen::Index n, double spread, std::uint64_t seed);

inline constexpr double kBoundaryBand = 1e-6;

struct EquivalenceCheck {
    enum class Status { consistent, inconsistent, skipped };

    Status status;
    double cp_margin;
    bool cp;
    bool violated_k1;
    bool violated_k2;
};

/// Compare the CP inequality with the k = 1 and k = 2 falsifiers.
/// Consistent iff (cp == !violated_k1) and not (violated_k2 && !violated_k1).
/// Maps with |cp_margin| < kBoundaryBand are skipped.
EquivalenceCheck verify_cp_equivalence(const GaussianMap<double> & map, std::span<const double> r_grid,
                                       int samples, std::uint64_t seed, double tol = kDefaultTol);

} // namespace gaussdiv::oracle

#endif // GAUSSDIV_ORACLE_HPP
