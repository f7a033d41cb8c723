#ifndef GAUSSDIV_QUADRATURE_HPP
#define GAUSSDIV_QUADRATURE_HPP

#include <functional>
#include <span>
#include <vector>

namespace gaussdiv {

struct QuadratureOptions {
    double abs_tol = 1e-13;
    double rel_tol = 1e-12;
    unsigned max_depth = 30;
};

/// Adaptive Gauss-Kronrod (7/15) integral of f over [a, b]: panels are bisected
/// until |K15 - G7| <= max(abs_tol, rel_tol |Q|) summed over the leaves.
/// Throws NumericalFailure when the final estimate still exceeds 100 x that bound.
double integrate(const std::function<double(double)> & f, double a, double b,
                 const QuadratureOptions & opts = {});

/// Uniform panel edges on [0, horizon] merged with extra breakpoints (deduplicated, sorted).
std::vector<double> make_nodes(double horizon, int panels, std::span<const double> breakpoints = {});

/// t -> integral_0^t f(s) ds with the running integral cached at a fixed set
/// of nodes. Evaluation adds one short adaptive integral from the nearest node
/// below t. Read-only after construction.
class CumulativeIntegral {
public:
    CumulativeIntegral(std::function<double(double)> f, std::vector<double> nodes,
                       QuadratureOptions opts = {});

    double operator()(double t) const;

    double integrand(double t) const { return f_(t); }
    double horizon() const noexcept { return nodes_.back(); }
    std::span<const double> nodes() const noexcept { return nodes_; }
    std::span<const double> node_values() const noexcept { return values_; }

private:
    std::function<double(double)> f_;
    std::vector<double> nodes_;
    std::vector<double> values_;
    QuadratureOptions opts_;
};

} // namespace gaussdiv

#endif // GAUSSDIV_QUADRATURE_HPP
