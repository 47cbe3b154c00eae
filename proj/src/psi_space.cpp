#include "hilfer/psi_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hilfer {

PsiMap PsiMap::power(double rho) {
    if (!std::isfinite(rho) || rho <= 0.0)
        throw DomainError("psi power map needs rho > 0, got " + std::to_string(rho));
    return PsiMap(PsiKind::power, rho);
}

PsiMap::Value PsiMap::eval(double t) const {
    if (!std::isfinite(t)) throw DomainError("psi: non-finite argument");
    switch (kind_) {
        case PsiKind::identity:
            return {t, 1.0};
        case PsiKind::logarithm:
            if (t <= 0.0)
                throw DomainError("psi = ln t needs t > 0, got " + std::to_string(t));
            return {std::log(t), 1.0 / t};
        case PsiKind::power:
            if (t < 0.0)
                throw DomainError("psi = t^rho needs t >= 0, got " + std::to_string(t));
            return {std::pow(t, rho_), rho_ * std::pow(t, rho_ - 1.0)};
    }
    return {t, 1.0};
}

double PsiMap::inverse(double x) const {
    switch (kind_) {
        case PsiKind::identity:
            return x;
        case PsiKind::logarithm:
            return std::exp(x);
        case PsiKind::power:
            if (x < 0.0) throw DomainError("inverse of t^rho needs x >= 0");
            return std::pow(x, 1.0 / rho_);
    }
    return x;
}

void PsiMap::check_interval(double a, double T) const {
    if (!std::isfinite(a) || !std::isfinite(T) || !(T > a))
        throw DomainError("interval needs finite endpoints with T > a");
    if (kind_ == PsiKind::logarithm && a <= 0.0)
        throw DomainError("psi = ln t needs a > 0 (ln is undefined at 0)");
    if (kind_ == PsiKind::power && a < 0.0) throw DomainError("psi = t^rho needs a >= 0");
}

std::string PsiMap::name() const {
    switch (kind_) {
        case PsiKind::identity:
            return "identity";
        case PsiKind::logarithm:
            return "log";
        case PsiKind::power:
            return "power";
    }
    return "identity";
}

FracOrder::FracOrder(double alpha, double beta) : alpha_(alpha), beta_(beta) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw DomainError("order alpha must lie in (0, 1], got " + std::to_string(alpha));
    if (!(beta >= 0.0 && beta <= 1.0))
        throw DomainError("type beta must lie in [0, 1], got " + std::to_string(beta));
    gamma_ = alpha + beta * (1.0 - alpha);
    // Exact at the endpoints, where rounding could otherwise leave 1 - 1e-17.
    if (beta == 1.0 || alpha == 1.0) gamma_ = 1.0;
}

Mesh::Mesh(PsiMap psi, double a, double T, std::size_t n, double grading)
    : psi_(psi), a_(a), T_(T), n_(n), grading_(grading) {
    psi_.check_interval(a, T);
    if (n < 1) throw DomainError("mesh needs at least one cell");
    if (!std::isfinite(grading) || grading < 1.0)
        throw DomainError("mesh grading exponent must be >= 1");
    psi_a_ = psi_(a);
    const double span = psi_(T) - psi_a_;
    if (!(span > 0.0)) throw DomainError("degenerate interval in psi-space");
    t_.resize(n + 1);
    x_.resize(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        const double s = static_cast<double>(j) / static_cast<double>(n);
        x_[j] = span * std::pow(s, grading);
        t_[j] = psi_.inverse(psi_a_ + x_[j]);
    }
    x_[0] = 0.0;
    x_[n] = span;
    t_[0] = a;
    t_[n] = T;
    for (std::size_t j = 1; j <= n; ++j) {
        if (!(x_[j] > x_[j - 1]) || !(t_[j] > t_[j - 1]))
            throw DomainError("mesh nodes are not strictly increasing (n or grading too large)");
    }
}

MeshPtr build_mesh(const PsiMap& psi, double a, double T, std::size_t n, double grading) {
    return std::make_shared<const Mesh>(psi, a, T, n, grading);
}

GridFunction::GridFunction(MeshPtr mesh, std::vector<double> values, double weight_exp)
    : mesh_(std::move(mesh)), values_(std::move(values)), weight_(weight_exp) {
    if (!mesh_) throw ContractError("grid function without a mesh");
    if (values_.size() != mesh_->size())
        throw ContractError("grid function has " + std::to_string(values_.size()) +
                            " values for a mesh of " + std::to_string(mesh_->size()) + " nodes");
    if (!(weight_exp >= 0.0 && weight_exp < 1.0))
        throw ContractError("weight exponent must lie in [0, 1)");
    for (double v : values_)
        if (!std::isfinite(v)) throw ContractError("grid function values must be finite");
}

double GridFunction::plain(std::size_t j) const {
    if (weight_ == 0.0) return values_[j];
    const double x = mesh_->x(j);
    if (j == 0) {
        if (values_[0] == 0.0) return 0.0;
        return std::copysign(std::numeric_limits<double>::infinity(), values_[0]);
    }
    return values_[j] * std::pow(x, -weight_);
}

GridFunction GridFunction::reweighted(double w_new) const {
    if (same_weight(w_new, weight_)) return *this;
    if (w_new < weight_) throw ContractError("cannot lower the weight of a singular grid function");
    std::vector<double> v(values_.size());
    v[0] = 0.0;
    for (std::size_t j = 1; j < v.size(); ++j)
        v[j] = values_[j] * std::pow(mesh_->x(j), w_new - weight_);
    return GridFunction(mesh_, std::move(v), w_new);
}

bool GridFunction::same_mesh(const GridFunction& other) const {
    return mesh_ == other.mesh_ || *mesh_ == *other.mesh_;
}

double weighted_norm(const GridFunction& u, const FracOrder& order) {
    const double w = order.weight();
    double result = 0.0;
    if (same_weight(u.weight_exp(), w)) {
        for (double v : u.values()) result = std::max(result, std::abs(v));
        return result;
    }
    if (u.weight_exp() != 0.0)
        throw ContractError("weighted_norm: grid function weight " +
                            std::to_string(u.weight_exp()) + " is neither 0 nor 1 - gamma = " +
                            std::to_string(w));
    const Mesh& m = u.mesh();
    for (std::size_t j = (w > 0.0 ? 1 : 0); j < u.size(); ++j)
        result = std::max(result, std::abs(std::pow(m.x(j), w) * u[j]));
    return result;
}

}  // namespace hilfer
