#pragma once

#include "hilfer/solver.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hilfer {

enum class StabilityKind { ulam_hyers, ulam_hyers_rassias };

/// Ulam-Hyers constant
///   c_f = X^alpha / Gamma(alpha + 1) * E_alpha(k X^alpha / (1 - l)),  X = psi(T) - psi(a).
/// Throws CertificationError (carrying the ratio) unless combined_ratio < 1.
double uh_constant(const CauchyProblem& p, const MlEvalPolicy& policy = {});

/// Ulam-Hyers-Rassias constant
///   c_f = lambda_phi / (1 - k X^alpha / ((1 - l) Gamma(alpha + 1))).
/// Throws CertificationError unless combined_ratio < 1, DomainError unless lambda_phi > 0.
double uhr_constant(const CauchyProblem& p, double lambda_phi);

struct LambdaPhiEstimate {
    double value;                 // max over t > a of I^alpha phi / phi
    std::optional<double> declared;
    bool declared_ok;             // value <= declared (true when nothing is declared)
};

/// Sharp discrete lambda_phi for (H3). phi is evaluated at the nodes (only t
/// is used); it must be positive on (a, T] and nondecreasing, else DomainError.
LambdaPhiEstimate estimate_lambda_phi(const CauchyProblem& p, const Expr& phi, const MeshPtr& mesh,
                                      std::optional<double> declared = std::nullopt);

struct AssumptionFlags {
    bool h1_continuity = true;  // asserted, not checked
    bool h2_declared = false;   // k and l were declared
    bool contraction = false;   // combined ratio < 1
    bool h3 = true;             // lambda_phi confirmed (UHR only)
};

struct StabilityCertificate {
    StabilityKind kind = StabilityKind::ulam_hyers;
    double ratio = 0.0;
    double contraction_factor = 0.0;
    double c_f = 0.0;
    /// UHR only.
    double lambda_phi = 0.0;
    std::optional<LambdaPhiEstimate> lambda_estimate;
    Expr phi;
    AssumptionFlags assumptions;

    /// Generalized-UH instantiation Phi(eps) = c_f eps.
    double phi_of(double eps) const { return c_f * eps; }
};

/// UH certificate. Throws CertificationError when the contraction ratio is >= 1.
StabilityCertificate certify_uh(const CauchyProblem& p, const MlEvalPolicy& policy = {});

/// UHR certificate. lambda_phi is the declared value when the estimate does
/// not exceed it, otherwise the estimate, with assumptions.h3 = false.
StabilityCertificate certify_uhr(const CauchyProblem& p, const Expr& phi, const MeshPtr& mesh,
                                 std::optional<double> declared_lambda_phi = std::nullopt);

enum class PerturbationShape { zero, constant, phi_scaled, random_bounded };

std::string to_string(PerturbationShape shape);
/// Throws DomainError for unknown names.
PerturbationShape parse_shape(const std::string& name);

struct PerturbationSpec {
    double epsilon = 1e-2;
    PerturbationShape shape = PerturbationShape::constant;
    int trials = 20;
    std::uint64_t seed = 1;
    /// Relative slack on the bound before a trial is re-run at twice the resolution.
    double allowance = 0.05;
    /// 0 picks the hardware concurrency.
    unsigned threads = 0;

    void validate() const;
};

/// Seed of trial i: SplitMix64 of base + i.
std::uint64_t trial_seed(std::uint64_t base, int trial);

/// Nodal perturbation for one trial. With phi_nodes (UHR) every shape is
/// scaled by phi so |g| <= eps phi; without them |g| <= eps and phi_scaled
/// is a ContractError. Random shapes draw uniform values in [-1, 1], apply one
/// three-point averaging pass, then scale.
std::vector<double> draw_perturbation(const Mesh& mesh, const PerturbationSpec& spec,
                                      std::uint64_t seed, const std::vector<double>* phi_nodes);

struct TrialResult {
    int trial = 0;
    std::uint64_t seed = 0;
    double max_abs_diff = 0.0;
    double bound = 0.0;
    double ratio = 0.0;
    /// Ratio after the 2x re-run; NaN when no re-run was needed.
    double refined_ratio = 0.0;
    std::string verdict;  // "pass", "pass_refined", "fail", "solve_failed"
    std::string message;
};

struct PerturbationReport {
    StabilityKind kind = StabilityKind::ulam_hyers;
    PerturbationSpec spec;
    double c_f = 0.0;
    std::size_t cells = 0;
    std::vector<TrialResult> trials;
    double max_ratio = 0.0;
    int failed = 0;
    int refined = 0;
    bool pass = false;

    /// RFC-4180 CSV, 15 significant digits: one row per trial, then a blank
    /// line and a key,value summary block.
    void write_csv(std::ostream& out) const;
};

/// Solves the unperturbed problem once, then each trial's perturbed problem
/// D z = f(t, z, D z) + g with the same initial datum, and records
///   r = max_{t > a} |z - y| / (c_f eps [phi(t)]).
/// Trials run in parallel and are stored by index, so the report does not
/// depend on scheduling. Trials with r > 1 + allowance are re-run at twice
/// the cells before being marked failed.
PerturbationReport perturb_and_check(const CauchyProblem& p, const StabilityCertificate& cert,
                                     const PerturbationSpec& spec, const MeshPtr& mesh,
                                     const SolveOptions& options = {});

}  // namespace hilfer
