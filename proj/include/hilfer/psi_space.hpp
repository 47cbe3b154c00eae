#pragma once

#include "hilfer/errors.hpp"

#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace hilfer {

enum class PsiKind { identity, logarithm, power };

/// Strictly increasing coordinate map psi. Every psi-fractional operator
/// becomes a classical Riemann-Liouville operator in x = psi(t).
class PsiMap {
public:
    struct Value {
        double psi;
        double dpsi;
    };

    static PsiMap identity() { return PsiMap(PsiKind::identity, 1.0); }
    static PsiMap logarithm() { return PsiMap(PsiKind::logarithm, 1.0); }
    static PsiMap power(double rho);

    PsiKind kind() const noexcept { return kind_; }
    double rho() const noexcept { return rho_; }

    /// psi(t) and psi'(t). Throws DomainError outside the map's domain.
    Value eval(double t) const;
    double operator()(double t) const { return eval(t).psi; }
    double inverse(double x) const;

    /// Throws DomainError unless [a, T] lies in the domain with T > a.
    void check_interval(double a, double T) const;

    /// "identity", "log" or "power".
    std::string name() const;

    friend bool operator==(const PsiMap&, const PsiMap&) = default;

private:
    PsiMap(PsiKind kind, double rho) : kind_(kind), rho_(rho) {}

    PsiKind kind_;
    double rho_;
};

/// Fractional order alpha in (0, 1] and type beta in [0, 1].
class FracOrder {
public:
    FracOrder(double alpha, double beta);

    double alpha() const noexcept { return alpha_; }
    double beta() const noexcept { return beta_; }
    /// gamma = alpha + beta (1 - alpha)
    double gamma() const noexcept { return gamma_; }
    /// Exponent of the weighted space C_{1-gamma; psi}.
    double weight() const noexcept { return 1.0 - gamma_; }

private:
    double alpha_;
    double beta_;
    double gamma_;
};

/// Nodes t_0 = a < ... < t_n = T with psi(t_j) = psi(a) + (psi(T) - psi(a)) (j/n)^r.
///
/// `x(j)` is the shifted psi-space coordinate psi(t_j) - psi(a); it is
/// computed from the grading formula directly rather than round-tripped
/// through psi, so x(0) = 0 exactly.
class Mesh {
public:
    Mesh(PsiMap psi, double a, double T, std::size_t n, double grading);

    const PsiMap& psi() const noexcept { return psi_; }
    double a() const noexcept { return a_; }
    double T() const noexcept { return T_; }
    std::size_t cells() const noexcept { return n_; }
    std::size_t size() const noexcept { return n_ + 1; }
    double grading() const noexcept { return grading_; }
    double psi_a() const noexcept { return psi_a_; }
    /// psi(T) - psi(a)
    double length() const noexcept { return x_.back(); }

    double t(std::size_t j) const { return t_[j]; }
    double x(std::size_t j) const { return x_[j]; }
    std::span<const double> t_nodes() const noexcept { return t_; }
    std::span<const double> x_nodes() const noexcept { return x_; }

    /// Same interval, map and grading with twice the cells; r = 1 nests.
    Mesh refined() const { return Mesh(psi_, a_, T_, 2 * n_, grading_); }

    friend bool operator==(const Mesh& l, const Mesh& r) {
        return l.psi_ == r.psi_ && l.a_ == r.a_ && l.T_ == r.T_ && l.n_ == r.n_ &&
               l.grading_ == r.grading_;
    }

private:
    PsiMap psi_;
    double a_;
    double T_;
    std::size_t n_;
    double grading_;
    double psi_a_;
    std::vector<double> t_;
    std::vector<double> x_;
};

using MeshPtr = std::shared_ptr<const Mesh>;

MeshPtr build_mesh(const PsiMap& psi, double a, double T, std::size_t n, double grading = 1.0);

/// Grading that clusters nodes near t = a for kernel exponent alpha - 1.
inline double default_grading(double alpha) { return alpha < 1.0 ? 2.0 / alpha : 1.0; }

/// Samples on a mesh. Stored values are (psi(t) - psi(a))^w u(t) so that
/// functions blowing up like (psi(t) - psi(a))^{-w} stay finite at t = a.
class GridFunction {
public:
    GridFunction(MeshPtr mesh, std::vector<double> values, double weight_exp = 0.0);

    /// Samples u(t_j) of a plain function.
    template <class F>
    static GridFunction sample(MeshPtr mesh, F&& u) {
        std::vector<double> v(mesh->size());
        for (std::size_t j = 0; j < v.size(); ++j) v[j] = u(mesh->t(j));
        return GridFunction(std::move(mesh), std::move(v), 0.0);
    }

    const Mesh& mesh() const noexcept { return *mesh_; }
    const MeshPtr& mesh_ptr() const noexcept { return mesh_; }
    std::size_t size() const noexcept { return values_.size(); }
    double weight_exp() const noexcept { return weight_; }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t j) const { return values_[j]; }

    /// u(t_j). Infinite at j = 0 when the weight is positive and the stored value nonzero.
    double plain(std::size_t j) const;

    /// Same function stored with weight exponent w_new >= weight_exp().
    GridFunction reweighted(double w_new) const;

    bool same_mesh(const GridFunction& other) const;

private:
    MeshPtr mesh_;
    std::vector<double> values_;
    double weight_;
};

/// max_j |(psi(t_j) - psi(a))^{1-gamma} u(t_j)|.
///
/// For plain samples with gamma < 1 the node t = a is left out: the weighted
/// space is defined on (a, T] and the weight vanishes there.
/// Throws ContractError when the weight exponent is neither 0 nor 1 - gamma.
double weighted_norm(const GridFunction& u, const FracOrder& order);

/// True when |w1 - w2| is within rounding.
inline bool same_weight(double w1, double w2) { return std::abs(w1 - w2) <= 1e-14; }

}  // namespace hilfer
