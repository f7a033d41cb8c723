#include "gaussdiv/oracle.hpp"

#include <random>

namespace gaussdiv::oracle {

WitnessState tmsv_witness(double r)
{
    return {r, 0, 1, two_mode_squeezed_covariance(2, 0, 1, r)};
}

GaussianMap<double> random_gaussian_map(Eigen::Index n, double spread, std::uint64_t seed)
{
    if (!(spread > 0.0))
        throw InvalidArgument("random_gaussian_map: spread must be positive");
    detail::mode_count(2 * n, "random_gaussian_map");
    std::mt19937_64 rng(derive_seed(seed, 0));
    std::uniform_real_distribution<double> entry(-spread, spread);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> scale(0.0, 2.0);

    const Eigen::Index d = 2 * n;
    Eigen::MatrixXd x(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            x(i, j) = entry(rng);
    Eigen::MatrixXd a(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            a(i, j) = unit(rng);
    Eigen::MatrixXd y = scale(rng) * a.transpose() * a;
    y = 0.5 * (y + y.transpose());
    return {x, y};
}

EquivalenceCheck verify_cp_equivalence(const GaussianMap<double> & map, std::span<const double> r_grid,
                                       int samples, std::uint64_t seed, double tol)
{
    const auto cp = is_cp(map, tol);
    EquivalenceCheck check{EquivalenceCheck::Status::skipped, cp.margin, cp.ok, false, false};
    if (std::abs(cp.margin) < kBoundaryBand)
        return check;
    check.violated_k1 = kpositivity_falsifier(map, 1, r_grid, samples, seed, tol).violated;
    check.violated_k2 = kpositivity_falsifier(map, 2, r_grid, samples, derive_seed(seed, 1), tol).violated;
    const bool agree = cp.ok == !check.violated_k1;
    const bool k_independent = !(check.violated_k2 && !check.violated_k1);
    check.status = agree && k_independent ? EquivalenceCheck::Status::consistent
                                          : EquivalenceCheck::Status::inconsistent;
    return check;
}

} // namespace gaussdiv::oracle
