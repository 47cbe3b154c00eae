#pragma once

#include "hilfer/fraccalc.hpp"
#include "hilfer/psi_space.hpp"
#include "hilfer/rhs_expr.hpp"

#include <optional>
#include <span>
#include <vector>

namespace hilfer {

/// Find y with  D^{alpha,beta;psi} y = f(t, y, D y)  on (a, T],  I^{1-gamma;psi} y(a) = y_a.
struct CauchyProblem {
    PsiMap psi = PsiMap::identity();
    FracOrder order{0.5, 0.0};
    double a = 0.0;
    double T = 1.0;
    double y_a = 1.0;
    Expr rhs;
    /// Declared Lipschitz constants of f in y and in d.
    std::optional<double> k;
    std::optional<double> l;

    /// Throws DomainError on T <= a, psi domain violations, a < 1 for the log
    /// map, negative k, l outside [0, 1) or a non-finite y_a; ContractError
    /// on an empty rhs.
    void validate() const;

    /// psi(T) - psi(a)
    double length() const { return psi(T) - psi(a); }
};

/// L = k X^alpha / Gamma(alpha + 1) + l with X = psi(T) - psi(a).
/// Throws ContractError when k or l is not declared.
double contraction_factor(const CauchyProblem& p);

/// k X^alpha / (Gamma(alpha + 1) (1 - l)); < 1 exactly when L < 1.
/// Throws DomainError when l >= 1.
double combined_ratio(const CauchyProblem& p);

struct UniquenessVerdict {
    bool certified;
    double ratio;   // combined_ratio
    double factor;  // contraction_factor
};

/// The sufficient condition of the contraction argument. A negative verdict
/// says nothing about existence.
UniquenessVerdict certify_unique(const CauchyProblem& p);

struct SolveOptions {
    double tol = 1e-12;
    int max_iter = 500;
    MlEvalPolicy policy{};
};

struct Solution {
    /// g = D y, stored with weight 1 - gamma.
    GridFunction g;
    /// y, stored with weight 1 - gamma; the value at t = a is y_a / Gamma(gamma).
    GridFunction y;
    int iterations = 0;
    double final_update_norm = 0.0;
    /// Weighted norms of every Picard correction, in order.
    std::vector<double> update_norms;
    /// NaN when k or l is not declared.
    double contraction_factor = 0.0;
    /// final_update_norm L / (1 - L) when L < 1, +inf otherwise.
    double error_bound = 0.0;
};

/// Picard iteration on the auxiliary function g of the Volterra form
///   y = x^{gamma-1} y_a / Gamma(gamma) + I^alpha g,   g = f(t, y, g).
/// Holds the integral operator so repeated solves on one mesh share it.
class PicardSolver {
public:
    PicardSolver(CauchyProblem problem, MeshPtr mesh, SolveOptions options = {});

    const CauchyProblem& problem() const noexcept { return problem_; }
    const MeshPtr& mesh() const noexcept { return mesh_; }

    /// Solves with an optional additive forcing (plain values per node) on the
    /// right-hand side. Throws ConvergenceError with the last update norm when
    /// max_iter is exceeded; EvalError from the rhs propagates.
    Solution solve(std::span<const double> forcing = {}) const;

private:
    CauchyProblem problem_;
    MeshPtr mesh_;
    SolveOptions options_;
    FracIntegralOperator op_;
    std::vector<Expr> bound_rhs_;  // rhs with t folded in, per node
};

Solution picard_solve(const CauchyProblem& p, const MeshPtr& mesh, const SolveOptions& options = {});

/// Box of (y, d) values over which Lipschitz constants are sampled.
struct LipschitzBox {
    double y_lo;
    double y_hi;
    double d_lo;
    double d_hi;
};

struct LipschitzEstimate {
    double k;
    double l;
    LipschitzBox box;
};

/// Max sampled |df/dy| and |df/dd| by central differences on a samples^3
/// grid over nodes t > a and the box. Without a box one is derived from a
/// trial solve on `mesh` (plain y and g over t > a, widened by 10%).
/// Throws EvalError when f cannot be evaluated in the box.
LipschitzEstimate estimate_lipschitz(const CauchyProblem& p, const MeshPtr& mesh, int samples = 9,
                                     std::optional<LipschitzBox> box = std::nullopt);

}  // namespace hilfer
