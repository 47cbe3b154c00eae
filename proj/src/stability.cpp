#include "hilfer/stability.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>
#include <thread>

namespace hilfer {

namespace {

void require_certified(double ratio) {
    if (!(ratio < 1.0))
        throw CertificationError("not certified: contraction ratio " + std::to_string(ratio) + " >= 1",
                                 ratio);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

std::vector<double> phi_at_nodes(const Expr& phi, const Mesh& m) {
    std::vector<double> out(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) out[i] = phi.eval(m.t(i), 0.0, 0.0);
    return out;
}

struct Difference {
    double max_abs = 0.0;
    double ratio = 0.0;
    double bound = 0.0;
};

// max over t > a of |z - y| and of |z - y| / (c_f eps [phi]).
Difference compare(const Solution& y, const Solution& z, double scale,
                   const std::vector<double>* phi) {
    Difference out;
    const Mesh& m = y.y.mesh();
    const double w = y.y.weight_exp();
    for (std::size_t i = 1; i < m.size(); ++i) {
        const double xw = w > 0.0 ? std::pow(m.x(i), -w) : 1.0;
        const double diff = std::abs(z.y[i] - y.y[i]) * xw;
        const double bound = phi ? scale * (*phi)[i] : scale;
        out.max_abs = std::max(out.max_abs, diff);
        const double r = bound > 0.0 ? diff / bound : (diff > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
        if (r >= out.ratio) {
            out.ratio = r;
            out.bound = bound;
        }
    }
    if (out.bound == 0.0) out.bound = phi ? scale * phi->back() : scale;
    return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

double uh_constant(const CauchyProblem& p, const MlEvalPolicy& policy) {
    const double ratio = combined_ratio(p);
    require_certified(ratio);
    const double alpha = p.order.alpha();
    const double xa = std::pow(p.length(), alpha);
    return xa / gamma_fn(alpha + 1.0) * mittag_leffler(alpha, *p.k * xa / (1.0 - *p.l), policy);
}

double uhr_constant(const CauchyProblem& p, double lambda_phi) {
    if (!(lambda_phi > 0.0) || !std::isfinite(lambda_phi)) throw DomainError("lambda_phi must be positive");
    const double ratio = combined_ratio(p);
    require_certified(ratio);
    return lambda_phi / (1.0 - ratio);
}

LambdaPhiEstimate estimate_lambda_phi(const CauchyProblem& p, const Expr& phi, const MeshPtr& mesh,
                                      std::optional<double> declared) {
    if (phi.empty()) throw ContractError("phi expression is empty");
    if (phi.depends_on_y() || phi.depends_on_d()) throw DomainError("phi may depend on t only");
    const Mesh& m = *mesh;
    const std::vector<double> values = phi_at_nodes(phi, m);
    for (std::size_t i = 1; i < m.size(); ++i) {
        if (!(values[i] > 0.0))
            throw DomainError("phi must be positive on (a, T]; phi(" + fmt(m.t(i)) + ") = " + fmt(values[i]));
        if (values[i] < values[i - 1]) throw DomainError("phi must be nondecreasing");
    }
    if (values[0] < 0.0) throw DomainError("phi must be nonnegative at t = a");
    const GridFunction iphi = FracIntegralOperator(mesh, p.order.alpha()).apply(GridFunction(mesh, values));
    double best = 0.0;
    for (std::size_t i = 1; i < m.size(); ++i) best = std::max(best, iphi[i] / values[i]);
    return {best, declared, !declared || best <= *declared};
}

StabilityCertificate certify_uh(const CauchyProblem& p, const MlEvalPolicy& policy) {
    StabilityCertificate cert;
    cert.kind = StabilityKind::ulam_hyers;
    cert.assumptions.h2_declared = p.k.has_value() && p.l.has_value();
    cert.ratio = combined_ratio(p);
    cert.contraction_factor = contraction_factor(p);
    cert.assumptions.contraction = cert.ratio < 1.0;
    cert.c_f = uh_constant(p, policy);
    return cert;
}

StabilityCertificate certify_uhr(const CauchyProblem& p, const Expr& phi, const MeshPtr& mesh,
                                 std::optional<double> declared_lambda_phi) {
    StabilityCertificate cert;
    cert.kind = StabilityKind::ulam_hyers_rassias;
    cert.phi = phi;
    cert.assumptions.h2_declared = p.k.has_value() && p.l.has_value();
    cert.ratio = combined_ratio(p);
    cert.contraction_factor = contraction_factor(p);
    cert.assumptions.contraction = cert.ratio < 1.0;
    require_certified(cert.ratio);
    cert.lambda_estimate = estimate_lambda_phi(p, phi, mesh, declared_lambda_phi);
    cert.assumptions.h3 = cert.lambda_estimate->declared_ok;
    cert.lambda_phi = (declared_lambda_phi && cert.lambda_estimate->declared_ok)
                          ? *declared_lambda_phi
                          : cert.lambda_estimate->value;
    cert.c_f = uhr_constant(p, cert.lambda_phi);
    return cert;
}

std::string to_string(PerturbationShape shape) {
    switch (shape) {
        case PerturbationShape::zero:
            return "zero";
        case PerturbationShape::constant:
            return "constant";
        case PerturbationShape::phi_scaled:
            return "phi_scaled";
        case PerturbationShape::random_bounded:
            return "random_bounded";
    }
    return "?";
}

PerturbationShape parse_shape(const std::string& name) {
    for (auto s : {PerturbationShape::zero, PerturbationShape::constant, PerturbationShape::phi_scaled,
                   PerturbationShape::random_bounded})
        if (to_string(s) == name) return s;
    throw DomainError("unknown perturbation shape '" + name + "'");
}

void PerturbationSpec::validate() const {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw DomainError("epsilon must be positive");
    if (trials < 1) throw DomainError("trials must be at least 1");
    if (!(allowance >= 0.0)) throw DomainError("allowance must be nonnegative");
}

std::uint64_t trial_seed(std::uint64_t base, int trial) {
    return splitmix64(base + static_cast<std::uint64_t>(trial));
}

std::vector<double> draw_perturbation(const Mesh& mesh, const PerturbationSpec& spec,
                                      std::uint64_t seed, const std::vector<double>* phi_nodes) {
    const std::size_t size = mesh.size();
    std::vector<double> unit(size, 0.0);
    switch (spec.shape) {
        case PerturbationShape::zero:
            return unit;
        case PerturbationShape::constant:
        case PerturbationShape::phi_scaled:
            std::fill(unit.begin(), unit.end(), 1.0);
            break;
        case PerturbationShape::random_bounded: {
            std::mt19937_64 gen(seed);
            // 53 random bits mapped to [-1, 1); identical on every platform.
            for (double& v : unit) v = 2.0 * static_cast<double>(gen() >> 11) * 0x1.0p-53 - 1.0;
            std::vector<double> smooth(size);
            for (std::size_t i = 0; i < size; ++i) {
                const std::size_t lo = i == 0 ? 0 : i - 1;
                const std::size_t hi = std::min(size - 1, i + 1);
                double s = 0.0;
                for (std::size_t j = lo; j <= hi; ++j) s += unit[j];
                smooth[i] = s / static_cast<double>(hi - lo + 1);
            }
            unit = std::move(smooth);
            break;
        }
    }
    // Under UHR every shape is scaled by phi so that |g| <= eps phi holds.
    const bool scaled = phi_nodes != nullptr;
    if (spec.shape == PerturbationShape::phi_scaled && !phi_nodes)
        throw ContractError("phi_scaled perturbation needs phi");
    for (std::size_t i = 0; i < size; ++i) unit[i] *= spec.epsilon * (scaled ? (*phi_nodes)[i] : 1.0);
    return unit;
}

PerturbationReport perturb_and_check(const CauchyProblem& p, const StabilityCertificate& cert,
                                     const PerturbationSpec& spec, const MeshPtr& mesh,
                                     const SolveOptions& options) {
    spec.validate();
    const bool uhr = cert.kind == StabilityKind::ulam_hyers_rassias;
    if (!(cert.c_f > 0.0)) throw ContractError("certificate has no positive c_f");
    if (uhr && cert.phi.empty()) throw ContractError("UHR certificate without phi");

    PerturbationReport report;
    report.kind = cert.kind;
    report.spec = spec;
    report.c_f = cert.c_f;
    report.cells = mesh->cells();
    report.trials.resize(static_cast<std::size_t>(spec.trials));

    struct Level {
        PicardSolver solver;
        Solution base;
        std::vector<double> phi;
    };
    auto make_level = [&](const MeshPtr& mp) {
        PicardSolver solver(p, mp, options);
        Solution base = solver.solve();
        std::vector<double> phi = uhr ? phi_at_nodes(cert.phi, *mp) : std::vector<double>{};
        return Level{std::move(solver), std::move(base), std::move(phi)};
    };
    const Level coarse = make_level(mesh);
    const double scale = cert.c_f * spec.epsilon;

    auto run = [&](const Level& level, std::uint64_t seed) {
        const std::vector<double>* phi = uhr ? &level.phi : nullptr;
        const std::vector<double> g = draw_perturbation(*level.solver.mesh(), spec, seed, phi);
        const Solution z = level.solver.solve(g);
        return compare(level.base, z, scale, phi);
    };

    std::atomic<int> next{0};
    auto worker = [&] {
        for (int t = next++; t < spec.trials; t = next++) {
            TrialResult& r = report.trials[static_cast<std::size_t>(t)];
            r.trial = t;
            r.seed = trial_seed(spec.seed, t);
            r.refined_ratio = std::numeric_limits<double>::quiet_NaN();
            try {
                const Difference d = run(coarse, r.seed);
                r.max_abs_diff = d.max_abs;
                r.bound = d.bound;
                r.ratio = d.ratio;
                r.verdict = r.ratio <= 1.0 + spec.allowance ? "pass" : "fail";
            } catch (const Error& e) {
                r.verdict = "solve_failed";
                r.message = e.what();
            }
        }
    };
    unsigned threads = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(spec.trials));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    // Re-run violations on a mesh with twice the cells.
    std::optional<Level> fine;
    for (TrialResult& r : report.trials) {
        if (r.verdict != "fail") continue;
        try {
            if (!fine)
                fine.emplace(make_level(build_mesh(p.psi, p.a, p.T, 2 * mesh->cells(), mesh->grading())));
            const Difference d = run(*fine, r.seed);
            r.refined_ratio = d.ratio;
            ++report.refined;
            if (d.ratio <= 1.0 + spec.allowance) r.verdict = "pass_refined";
        } catch (const Error& e) {
            r.message = e.what();
        }
    }

    for (const TrialResult& r : report.trials) {
        if (r.verdict == "fail" || r.verdict == "solve_failed") ++report.failed;
        report.max_ratio = std::max(report.max_ratio, r.ratio);
    }
    report.pass = report.failed == 0;
    return report;
}

void PerturbationReport::write_csv(std::ostream& out) const {
    out << "trial,seed,shape,epsilon,max_abs_diff,bound,ratio,verdict\r\n";
    const std::string shape = to_string(spec.shape);
    for (const TrialResult& r : trials) {
        out << r.trial << ',' << r.seed << ',' << shape << ',' << fmt(spec.epsilon) << ','
            << fmt(r.max_abs_diff) << ',' << fmt(r.bound) << ',' << fmt(r.ratio) << ',' << r.verdict
            << "\r\n";
    }
    out << "\r\n";
    out << "key,value\r\n";
    out << "kind," << (kind == StabilityKind::ulam_hyers ? "ulam_hyers" : "ulam_hyers_rassias") << "\r\n";
    out << "c_f," << fmt(c_f) << "\r\n";
    out << "phi_of_epsilon," << fmt(c_f * spec.epsilon) << "\r\n";
    out << "cells," << cells << "\r\n";
    out << "trials," << trials.size() << "\r\n";
    out << "seed," << spec.seed << "\r\n";
    out << "allowance," << fmt(spec.allowance) << "\r\n";
    out << "max_ratio," << fmt(max_ratio) << "\r\n";
    out << "refined_trials," << refined << "\r\n";
    out << "failed_trials," << failed << "\r\n";
    out << "verdict," << (pass ? "pass" : "fail") << "\r\n";
}

}  // namespace hilfer
