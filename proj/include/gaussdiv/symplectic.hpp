#ifndef GAUSSDIV_SYMPLECTIC_HPP
#define GAUSSDIV_SYMPLECTIC_HPP

// Small dense symplectic linear algebra: the symplectic form, validity of
// covariance matrices, symplectic spectra, Euler decomposition of one-mode
// symplectic matrices and seeded random symplectic sampling.
//
// Quadratures are ordered (q1, p1, q2, p2, ...), hbar = 1, vacuum variance 1/2.

#include <algorithm>
#include <complex>
#include <cstdint>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "gaussdiv/errors.hpp"

namespace gaussdiv {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;

/// Absolute tolerance on eigenvalues of order-one positivity matrices.
inline constexpr double kDefaultTol = 1e-9;

/// Omega_n: block diagonal with n copies of [[0, 1], [-1, 0]].
template <typename Scalar = double>
MatrixX<Scalar> symplectic_form(Eigen::Index n)
{
    if (n < 1)
        throw InvalidArgument("symplectic_form: mode count must be >= 1");
    MatrixX<Scalar> omega = MatrixX<Scalar>::Zero(2 * n, 2 * n);
    for (Eigen::Index j = 0; j < n; ++j) {
        omega(2 * j, 2 * j + 1) = Scalar(1);
        omega(2 * j + 1, 2 * j) = Scalar(-1);
    }
    return omega;
}

namespace detail {

template <typename Derived>
typename Derived::RealScalar max_abs(const Eigen::MatrixBase<Derived> & m)
{
    return m.size() == 0 ? typename Derived::RealScalar(0) : m.cwiseAbs().maxCoeff();
}

template <typename Derived>
bool is_symmetric(const Eigen::MatrixBase<Derived> & m, typename Derived::RealScalar rel_tol)
{
    using Real = typename Derived::RealScalar;
    if (m.rows() != m.cols())
        return false;
    const Real scale = std::max(Real(1), max_abs(m));
    return max_abs(m - m.adjoint()) <= rel_tol * scale;
}

inline Eigen::Index mode_count(Eigen::Index dim, const char * who)
{
    if (dim < 2 || dim % 2 != 0)
        throw InvalidArgument(std::string(who) + ": dimension must be a positive even number");
    return dim / 2;
}

} // namespace detail

/// Smallest eigenvalue of a Hermitian (or real symmetric) matrix.
///
/// Complex input is realified into the real symmetric matrix
/// [[Re M, -Im M], [Im M, Re M]], whose spectrum is that of M with every
/// eigenvalue doubled. Throws InvalidArgument when M is not Hermitian to
/// within 1e-10 relative to its largest entry.
template <typename Derived>
typename Derived::RealScalar hermitian_min_eig(const Eigen::MatrixBase<Derived> & m)
{
    using Real = typename Derived::RealScalar;
    if (m.rows() != m.cols())
        throw InvalidArgument("hermitian_min_eig: matrix must be square");
    if (m.rows() == 0)
        throw InvalidArgument("hermitian_min_eig: empty matrix");
    const Real scale = detail::max_abs(m);
    if (detail::max_abs(m - m.adjoint()) > Real(1e-10) * scale)
        throw InvalidArgument("hermitian_min_eig: matrix is not Hermitian");

    if constexpr (Eigen::NumTraits<typename Derived::Scalar>::IsComplex) {
        const Eigen::Index d = m.rows();
        MatrixX<Real> real(2 * d, 2 * d);
        real.topLeftCorner(d, d) = m.real();
        real.bottomRightCorner(d, d) = m.real();
        real.topRightCorner(d, d) = -m.imag();
        real.bottomLeftCorner(d, d) = m.imag();
        Eigen::SelfAdjointEigenSolver<MatrixX<Real>> es(real, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    } else {
        Eigen::SelfAdjointEigenSolver<MatrixX<Real>> es(m.eval(), Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }
}

/// sigma - (i/2) Omega for a real 2n x 2n matrix sigma.
template <typename Derived>
MatrixX<std::complex<typename Derived::Scalar>>
minus_half_i_omega(const Eigen::MatrixBase<Derived> & sigma)
{
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = detail::mode_count(sigma.rows(), "minus_half_i_omega");
    const std::complex<Scalar> half_i(0, Scalar(0.5));
    return sigma.template cast<std::complex<Scalar>>()
        - half_i * symplectic_form<Scalar>(n).template cast<std::complex<Scalar>>();
}

template <typename Scalar>
struct CovarianceCheck {
    bool valid;
    /// min eigenvalue of sigma - (i/2) Omega
    Scalar margin;
};

/// Robertson-Schroedinger test sigma >= (i/2) Omega.
template <typename Derived>
CovarianceCheck<typename Derived::Scalar>
is_valid_covariance(const Eigen::MatrixBase<Derived> & sigma,
                    typename Derived::Scalar tol = typename Derived::Scalar(kDefaultTol))
{
    using Scalar = typename Derived::Scalar;
    if (!detail::is_symmetric(sigma, Scalar(1e-10)))
        throw InvalidArgument("is_valid_covariance: covariance matrix is not symmetric");
    const Scalar margin = hermitian_min_eig(minus_half_i_omega(sigma));
    return {margin >= -tol, margin};
}

/// Symplectic eigenvalues of a positive definite covariance matrix, ascending.
/// Computed as singular values of L^T Omega L with sigma = L L^T, which is
/// similar to the antisymmetric part of i Omega sigma; each appears twice.
template <typename Derived>
VectorX<typename Derived::Scalar> symplectic_eigenvalues(const Eigen::MatrixBase<Derived> & sigma)
{
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = detail::mode_count(sigma.rows(), "symplectic_eigenvalues");
    if (!detail::is_symmetric(sigma, Scalar(1e-10)))
        throw InvalidArgument("symplectic_eigenvalues: covariance matrix is not symmetric");
    Eigen::LLT<MatrixX<Scalar>> llt(sigma.eval());
    if (llt.info() != Eigen::Success)
        throw InvalidArgument("symplectic_eigenvalues: covariance matrix is not positive definite");
    const MatrixX<Scalar> l = llt.matrixL();
    const MatrixX<Scalar> a = l.transpose() * symplectic_form<Scalar>(n) * l;
    Eigen::JacobiSVD<MatrixX<Scalar>> svd(a);
    const VectorX<Scalar> & sv = svd.singularValues(); // descending, pairs
    VectorX<Scalar> nu(n);
    for (Eigen::Index j = 0; j < n; ++j)
        nu(j) = Scalar(0.5) * (sv(2 * j) + sv(2 * j + 1));
    std::sort(nu.data(), nu.data() + n);
    return nu;
}

/// True iff ||S Omega S^T - Omega||_max <= tol. Non-square or odd-sized input is not symplectic.
template <typename Derived>
bool is_symplectic(const Eigen::MatrixBase<Derived> & s,
                   typename Derived::Scalar tol = typename Derived::Scalar(kDefaultTol))
{
    using Scalar = typename Derived::Scalar;
    if (s.rows() != s.cols() || s.rows() < 2 || s.rows() % 2 != 0)
        return false;
    const MatrixX<Scalar> omega = symplectic_form<Scalar>(s.rows() / 2);
    return detail::max_abs(s * omega * s.transpose() - omega) <= tol;
}

/// One-mode Euler (Bloch-Messiah) factors S = O1 * diag(z, 1/z) * O2.
template <typename Scalar = double>
struct EulerFactors {
    Matrix2<Scalar> o1;
    Matrix2<Scalar> o2;
    Scalar z; ///< in (0, 1]

    Matrix2<Scalar> squeezer() const { return Eigen::Vector2<Scalar>(z, Scalar(1) / z).asDiagonal(); }
    Matrix2<Scalar> reconstruct() const { return o1 * squeezer() * o2; }
};

/// Euler decomposition of a 2x2 symplectic matrix (det S = 1).
/// z = 1 / sigma_max(S); both factors are proper rotations. At z = 1 the
/// whole rotation is carried by O1 and O2 = identity.
template <typename Derived>
EulerFactors<typename Derived::Scalar> euler_decompose(const Eigen::MatrixBase<Derived> & s,
                                                       typename Derived::Scalar tol = typename Derived::Scalar(kDefaultTol))
{
    using Scalar = typename Derived::Scalar;
    if (s.rows() != 2 || s.cols() != 2 || !is_symplectic(s, tol))
        throw InvalidArgument("euler_decompose: input is not a one-mode symplectic matrix");
    const Matrix2<Scalar> m = s;
    Eigen::JacobiSVD<Matrix2<Scalar>> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Scalar s_max = svd.singularValues()(0);

    EulerFactors<Scalar> f;
    if (s_max - Scalar(1) <= Scalar(1e-12)) {
        f.o1 = m;
        f.o2 = Matrix2<Scalar>::Identity();
        f.z = Scalar(1);
        return f;
    }
    // m = U diag(s_max, s_min) V^T; swap axes so the small singular value comes first.
    Matrix2<Scalar> swap;
    swap << 0, 1, 1, 0;
    f.o1 = svd.matrixU() * swap;
    f.o2 = swap * svd.matrixV().transpose();
    f.z = Scalar(1) / s_max;
    if (f.o1.determinant() < 0) {
        // det O1 = det O2 since det m = det Z = 1; flip both with diag(1, -1), which commutes with Z.
        const Matrix2<Scalar> flip = Eigen::Vector2<Scalar>(1, -1).asDiagonal();
        f.o1 = f.o1 * flip;
        f.o2 = flip * f.o2;
    }
    return f;
}

/// Gaussian state: displacement D and covariance sigma.
template <typename Scalar = double>
struct GaussianState {
    VectorX<Scalar> displacement;
    MatrixX<Scalar> covariance;

    Eigen::Index modes() const { return covariance.rows() / 2; }

    static GaussianState vacuum(Eigen::Index n)
    {
        detail::mode_count(2 * n, "GaussianState::vacuum");
        return {VectorX<Scalar>::Zero(2 * n), Scalar(0.5) * MatrixX<Scalar>::Identity(2 * n, 2 * n)};
    }
};

/// SplitMix64 step; derives independent per-index seeds from one user seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Haar-random orthogonal symplectic (passive) transformation on n modes.
Eigen::MatrixXd random_orthosymplectic(Eigen::Index n, std::uint64_t seed);

/// Random symplectic O1 * (squeezers) * O2 with per-mode squeezing r uniform in [0, r_max].
/// Bitwise reproducible for a fixed seed on a given platform.
Eigen::MatrixXd random_symplectic(Eigen::Index n, double r_max, std::uint64_t seed);

/// Covariance (1/2) S S^T of a random pure state.
Eigen::MatrixXd random_pure_covariance(Eigen::Index n, double r_max, std::uint64_t seed);

} // namespace gaussdiv

#endif // GAUSSDIV_SYMPLECTIC_HPP
