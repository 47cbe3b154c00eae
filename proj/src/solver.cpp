#include "hilfer/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hilfer {

void CauchyProblem::validate() const {
    if (!std::isfinite(a) || !std::isfinite(T) || !(T > a))
        throw DomainError("interval: need finite a < T");
    psi.check_interval(a, T);
    if (psi.kind() == PsiKind::logarithm && a < 1.0)
        throw DomainError("psi = ln t needs a >= 1");
    if (!std::isfinite(y_a)) throw DomainError("y_a must be finite");
    if (rhs.empty()) throw ContractError("rhs expression is empty");
    if (k && (!std::isfinite(*k) || *k < 0.0)) throw DomainError("lipschitz k must be >= 0");
    if (l && (!std::isfinite(*l) || *l < 0.0 || *l >= 1.0))
        throw DomainError("lipschitz l must lie in [0, 1)");
}

double contraction_factor(const CauchyProblem& p) {
    if (!p.k || !p.l) throw ContractError("contraction factor needs declared k and l");
    const double alpha = p.order.alpha();
    return *p.k * std::pow(p.length(), alpha) / gamma_fn(alpha + 1.0) + *p.l;
}

double combined_ratio(const CauchyProblem& p) {
    if (!p.k || !p.l) throw ContractError("contraction ratio needs declared k and l");
    if (*p.l >= 1.0) throw DomainError("l >= 1: the d-slot is not contractive");
    const double alpha = p.order.alpha();
    return *p.k * std::pow(p.length(), alpha) / (gamma_fn(alpha + 1.0) * (1.0 - *p.l));
}

UniquenessVerdict certify_unique(const CauchyProblem& p) {
    const double ratio = combined_ratio(p);
    return {ratio < 1.0, ratio, contraction_factor(p)};
}

PicardSolver::PicardSolver(CauchyProblem problem, MeshPtr mesh, SolveOptions options)
    : problem_(std::move(problem)),
      mesh_(std::move(mesh)),
      options_(options),
      op_(mesh_, problem_.order.alpha()) {
    problem_.validate();
    if (!(options_.tol > 0.0)) throw DomainError("tol must be positive");
    if (options_.max_iter < 1) throw DomainError("max_iter must be at least 1");
    if (mesh_->a() != problem_.a || mesh_->T() != problem_.T || !(mesh_->psi() == problem_.psi))
        throw ContractError("mesh does not match the problem's interval and psi");
    if (mesh_->size() < 3) throw DiscretizationError("solver needs at least 2 cells");
    bound_rhs_.reserve(mesh_->size());
    for (std::size_t i = 0; i < mesh_->size(); ++i)
        bound_rhs_.push_back(problem_.rhs.bind_t(mesh_->t(i), options_.policy));
}

Solution PicardSolver::solve(std::span<const double> forcing) const {
    const Mesh& m = *mesh_;
    const std::size_t size = m.size();
    if (!forcing.empty() && forcing.size() != size)
        throw ContractError("forcing must have one value per node");
    const double gamma = problem_.order.gamma();
    const double w = gamma < 1.0 ? problem_.order.weight() : 0.0;
    const double y0 = problem_.y_a / gamma_fn(gamma);

    std::vector<double> xw(size, 0.0);  // x^w
    for (std::size_t i = 0; i < size; ++i) xw[i] = w > 0.0 ? std::pow(m.x(i), w) : 1.0;

    auto force = [&](std::size_t i) { return forcing.empty() ? 0.0 : forcing[i]; };

    // Stored (weighted) y from stored g.
    auto reconstruct = [&](const std::vector<double>& G) {
        const GridFunction ig = op_.apply(GridFunction(mesh_, G, w));
        std::vector<double> Y(size, y0);
        for (std::size_t i = 1; i < size; ++i) Y[i] = y0 + xw[i] * ig.plain(i);
        return Y;
    };

    // One application of the fixed-point map to stored g.
    auto update = [&](const std::vector<double>& G, const std::vector<double>& Y) {
        std::vector<double> next(size, 0.0);
        const std::size_t first = w > 0.0 ? 1 : 0;
        for (std::size_t i = first; i < size; ++i) {
            const double y = w > 0.0 ? Y[i] / xw[i] : Y[i];
            const double d = w > 0.0 ? G[i] / xw[i] : G[i];
            const double f = bound_rhs_[i].eval(m.t(i), y, d, options_.policy) + force(i);
            next[i] = xw[i] * f;
        }
        if (w > 0.0) {
            // t = a is outside (a, T]; extrapolate the weighted values.
            next[0] = next[1] - (next[2] - next[1]) * m.x(1) / (m.x(2) - m.x(1));
        }
        return next;
    };

    // Seed: g_0 = f(t, y_a-term, 0).
    std::vector<double> Y(size, y0);
    std::vector<double> G = update(std::vector<double>(size, 0.0), Y);

    Solution sol{GridFunction(mesh_, G, w), GridFunction(mesh_, Y, w), 0, 0.0, {}, 0.0, 0.0};
    sol.contraction_factor = (problem_.k && problem_.l) ? contraction_factor(problem_)
                                                        : std::numeric_limits<double>::quiet_NaN();
    double norm = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= options_.max_iter; ++it) {
        Y = reconstruct(G);
        std::vector<double> next = update(G, Y);
        norm = 0.0;
        for (std::size_t i = 0; i < size; ++i) norm = std::max(norm, std::abs(next[i] - G[i]));
        G = std::move(next);
        sol.update_norms.push_back(norm);
        if (!std::isfinite(norm))
            throw ConvergenceError("Picard iteration diverged (non-finite update)", norm);
        if (norm <= options_.tol) {
            Y = reconstruct(G);
            sol.g = GridFunction(mesh_, std::move(G), w);
            sol.y = GridFunction(mesh_, std::move(Y), w);
            sol.iterations = it;
            sol.final_update_norm = norm;
            const double L = sol.contraction_factor;
            sol.error_bound = (L < 1.0) ? norm * L / (1.0 - L) : std::numeric_limits<double>::infinity();
            return sol;
        }
    }
    throw ConvergenceError("Picard iteration did not reach tol within " +
                               std::to_string(options_.max_iter) + " iterations",
                           norm);
}

Solution picard_solve(const CauchyProblem& p, const MeshPtr& mesh, const SolveOptions& options) {
    return PicardSolver(p, mesh, options).solve();
}

LipschitzEstimate estimate_lipschitz(const CauchyProblem& p, const MeshPtr& mesh, int samples,
                                     std::optional<LipschitzBox> box) {
    p.validate();
    if (samples < 2) throw DomainError("estimate_lipschitz needs at least 2 samples per axis");
    const Mesh& m = *mesh;
    if (!box) {
        const Solution trial = picard_solve(p, mesh);
        LipschitzBox b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
                       std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
        for (std::size_t i = 1; i < m.size(); ++i) {
            b.y_lo = std::min(b.y_lo, trial.y.plain(i));
            b.y_hi = std::max(b.y_hi, trial.y.plain(i));
            b.d_lo = std::min(b.d_lo, trial.g.plain(i));
            b.d_hi = std::max(b.d_hi, trial.g.plain(i));
        }
        auto widen = [](double& lo, double& hi) {
            const double pad = 0.1 * std::max(hi - lo, std::max(std::abs(lo), std::abs(hi))) + 1e-3;
            lo -= pad;
            hi += pad;
        };
        widen(b.y_lo, b.y_hi);
        widen(b.d_lo, b.d_hi);
        box = b;
    }
    if (!(box->y_hi >= box->y_lo) || !(box->d_hi >= box->d_lo))
        throw DomainError("estimate_lipschitz: empty box");

    std::vector<std::size_t> nodes;
    const std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(samples), m.cells());
    for (std::size_t s = 0; s < count; ++s)
        nodes.push_back(1 + (s * (m.cells() - 1)) / std::max<std::size_t>(count - 1, 1));

    auto grid = [&](double lo, double hi, int s) { return lo + (hi - lo) * s / (samples - 1); };
    double k = 0.0;
    double l = 0.0;
    for (std::size_t i : nodes) {
        const double t = m.t(i);
        const Expr f = p.rhs.bind_t(t);
        for (int sy = 0; sy < samples; ++sy) {
            const double y = grid(box->y_lo, box->y_hi, sy);
            for (int sd = 0; sd < samples; ++sd) {
                const double d = grid(box->d_lo, box->d_hi, sd);
                const double hy = 1e-6 * std::max(1.0, std::abs(y));
                const double hd = 1e-6 * std::max(1.0, std::abs(d));
                k = std::max(k, std::abs(f.eval(t, y + hy, d) - f.eval(t, y - hy, d)) / (2.0 * hy));
                l = std::max(l, std::abs(f.eval(t, y, d + hd) - f.eval(t, y, d - hd)) / (2.0 * hd));
            }
        }
    }
    return {k, l, *box};
}

}  // namespace hilfer
