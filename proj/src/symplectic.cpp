#include "gaussdiv/symplectic.hpp"

#include <cmath>
#include <random>

namespace gaussdiv {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index)
{
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {

// Interleave a (q-block, p-block) ordered matrix into (q1, p1, q2, p2, ...).
Eigen::MatrixXd interleave(const Eigen::MatrixXd & blocked)
{
    const Eigen::Index n = blocked.rows() / 2;
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(2 * n);
    for (Eigen::Index j = 0; j < n; ++j) {
        perm.indices()(j) = static_cast<int>(2 * j);
        perm.indices()(n + j) = static_cast<int>(2 * j + 1);
    }
    return perm * blocked * perm.transpose();
}

Eigen::MatrixXd orthosymplectic(Eigen::Index n, std::mt19937_64 & rng)
{
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXcd g(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            g(i, j) = {gauss(rng), gauss(rng)};
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    Eigen::MatrixXcd q = qr.householderQ();
    const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    // Fix column phases so the distribution is Haar.
    for (Eigen::Index j = 0; j < n; ++j) {
        const double a = std::abs(r(j, j));
        if (a > 0)
            q.col(j) *= r(j, j) / a;
    }
    Eigen::MatrixXd blocked(2 * n, 2 * n);
    blocked.topLeftCorner(n, n) = q.real();
    blocked.topRightCorner(n, n) = -q.imag();
    blocked.bottomLeftCorner(n, n) = q.imag();
    blocked.bottomRightCorner(n, n) = q.real();
    return interleave(blocked);
}

} // namespace

Eigen::MatrixXd random_orthosymplectic(Eigen::Index n, std::uint64_t seed)
{
    detail::mode_count(2 * n, "random_orthosymplectic");
    std::mt19937_64 rng(derive_seed(seed, 0));
    return orthosymplectic(n, rng);
}

Eigen::MatrixXd random_symplectic(Eigen::Index n, double r_max, std::uint64_t seed)
{
    detail::mode_count(2 * n, "random_symplectic");
    if (!(r_max >= 0.0) || !std::isfinite(r_max))
        throw InvalidArgument("random_symplectic: r_max must be finite and non-negative");
    std::mt19937_64 rng(derive_seed(seed, 0));
    std::uniform_real_distribution<double> squeeze(0.0, r_max);

    const Eigen::MatrixXd o1 = orthosymplectic(n, rng);
    Eigen::VectorXd z(2 * n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double r = r_max > 0.0 ? squeeze(rng) : 0.0;
        z(2 * j) = std::exp(-r);
        z(2 * j + 1) = std::exp(r);
    }
    const Eigen::MatrixXd o2 = orthosymplectic(n, rng);
    return o1 * z.asDiagonal() * o2;
}

Eigen::MatrixXd random_pure_covariance(Eigen::Index n, double r_max, std::uint64_t seed)
{
    const Eigen::MatrixXd s = random_symplectic(n, r_max, seed);
    Eigen::MatrixXd sigma = 0.5 * s * s.transpose();
    return 0.5 * (sigma + sigma.transpose());
}

} // namespace gaussdiv
