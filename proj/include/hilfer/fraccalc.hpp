#pragma once

#include "hilfer/psi_space.hpp"
#include "hilfer/specfun.hpp"

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace hilfer {

/// Left psi-Riemann-Liouville integral of order alpha > 0 on a mesh,
/// discretized by product integration: the integrand is interpolated
/// piecewise-linearly in psi-space and the kernel moments
/// integral (X - x)^{alpha-1} {1, x} dx are integrated exactly per cell.
///
/// Weights are nonnegative and each row sums to x_i^alpha / Gamma(alpha + 1),
/// so the operator is exact on constants and on functions linear in psi.
///
/// Inputs with a weight exponent w > 0 (values ~ x^{-w} near t = a) use a
/// second table: the stored weighted values are interpolated and integrated
/// against (X - x)^{alpha-1} x^{-w}. Those tables are built on first use per
/// exponent and cached.
class FracIntegralOperator {
public:
    FracIntegralOperator(MeshPtr mesh, double alpha);

    const Mesh& mesh() const noexcept { return *mesh_; }
    const MeshPtr& mesh_ptr() const noexcept { return mesh_; }
    double alpha() const noexcept { return alpha_; }

    /// W[i][j], j <= i.
    double weight(std::size_t i, std::size_t j) const { return w_[row_offset(i) + j]; }
    /// Table for stored values with weight exponent w, same layout.
    const std::vector<double>& weighted_table(double w) const;
    double row_sum(std::size_t i) const;

    /// Node values of I^{alpha; psi} u.
    ///
    /// Plain input gives plain output with value 0 at t = a. Weighted input
    /// (w < 1) gives output with weight max(0, w - alpha); when w >= alpha the
    /// value at t = a is the limit v_0 Gamma(1 - w) / Gamma(1 - w + alpha).
    /// Throws ContractError when u lives on a different mesh.
    GridFunction apply(const GridFunction& u) const;

private:
    static std::size_t row_offset(std::size_t i) { return i * (i + 1) / 2; }

    MeshPtr mesh_;
    double alpha_;
    double gamma_alpha_;
    std::vector<double> w_;

    struct Cache {
        std::mutex mutex;
        std::map<double, std::shared_ptr<const std::vector<double>>> tables;
    };
    std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

/// Convenience wrapper building a one-off operator.
GridFunction frac_integral(const FracIntegralOperator& op, const GridFunction& u);

/// Numerical psi-Hilfer derivative of order alpha, type beta (n = 1).
///
/// Computed as I^{beta(1-alpha)} (d/dx) I^{(1-beta)(1-alpha)} u through the
/// equivalent single-differentiation form
///   (d/dx) I^{1-alpha} u  -  [I^{1-gamma} u](a) x^{gamma-alpha-1} / Gamma(gamma - alpha),
/// so no singular intermediate is ever integrated. d/dx uses three-point
/// nonuniform differences in psi-space (one-sided at t = T).
///
/// The result typically blows up like x^{-alpha} at t = a, so it is returned
/// with weight exponent alpha (plain when alpha = 1); the stored value at
/// t = a is extrapolated from the first two interior nodes.
///
/// u must be plain or carry weight 1 - gamma. Throws DiscretizationError for
/// fewer than 3 nodes. This is a diagnostic operator; the solver never uses it.
GridFunction hilfer_derivative(const GridFunction& u, const FracOrder& order);

/// max-node residual, in the C_{1-gamma} norm over t > a, of
///   I^alpha D^{alpha,beta} u  -  [u - x^{gamma-1}/Gamma(gamma) I^{1-gamma}u(a)].
double verify_theorem1(const GridFunction& u, const FracOrder& order);

/// max-node residual, in the C_{1-gamma} norm over t > a, of D^{alpha,beta} I^alpha v - v.
double verify_theorem2(const GridFunction& v, const FracOrder& order);

/// Relative residual of D^{alpha,beta} (psi(t) - psi(a))^{gamma-1} = 0: the
/// computed derivative divided by the size of either cancelling term,
/// Gamma(gamma)/Gamma(gamma-alpha) x^{gamma-alpha-1}, maximized over t > a.
/// For beta = 0 the second term vanishes and the absolute residual scaled
/// by x^{1-alpha} is reported.
double verify_kernel_identity(const MeshPtr& mesh, const FracOrder& order);

/// Upper bound for u from u <= v + g(t) int psi'(s)(psi(t)-psi(s))^{alpha-1} u(s) ds.
///
/// Nondecreasing v uses the closed form v(t) E_alpha(g(t) Gamma(alpha) x^alpha);
/// otherwise the kernel series
///   v(t) + sum_{k>=1} (g(t) Gamma(alpha))^k I^{alpha k} v(t)
/// is summed with product-integration operators of order alpha k (the
/// kernel integral of order alpha k is Gamma(alpha k) I^{alpha k}), stopping
/// once the k-th term's row-sum bound is below 1e-14 of the running bound.
/// Throws DomainError for negative inputs or non-monotone g, RangeError when
/// the bound overflows.
GridFunction gronwall_bound(const GridFunction& v, const GridFunction& g, double alpha,
                            const MlEvalPolicy& policy = {});

/// The kernel series form regardless of the monotonicity of v.
GridFunction gronwall_series_bound(const GridFunction& v, const GridFunction& g, double alpha,
                                   const MlEvalPolicy& policy = {});

}  // namespace hilfer
