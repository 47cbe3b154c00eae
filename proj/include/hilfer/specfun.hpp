#pragma once

#include "hilfer/errors.hpp"

namespace hilfer {

/// Truncation and domain policy for the Mittag-Leffler series.
///
/// The series is cut once two consecutive terms fall below
/// `rel_tol * |partial sum|`. A single-term test misfires for small mu,
/// where Gamma(mu*k + 1) grows slowly and terms plateau.
struct MlEvalPolicy {
    double rel_tol = 1e-14;
    int max_terms = 4000;
    double arg_bound = 50.0;

    /// Throws ContractError unless rel_tol in (0, 1e-6], max_terms >= 50, arg_bound > 0.
    void validate() const;
};

/// Gamma function on the positive real axis. Relative error <= 1e-12 on (0, 170].
double gamma_fn(double x);

/// log Gamma(x) for x > 0.
double log_gamma(double x);

/// Error function. Absolute error <= 1e-12; exactly odd.
double erf_fn(double z);

/// One-parameter Mittag-Leffler function E_mu(z) = sum_k z^k / Gamma(mu k + 1).
///
/// Nonnegative arguments are summed in double precision with compensated
/// summation. Negative arguments give an alternating series whose terms can
/// exceed the result by hundreds of orders of magnitude (E_{1/2}(-20) ~ 0.03
/// with terms near 1e173), so they are summed in MPFR at a precision chosen
/// from the largest term.
///
/// Throws DomainError for mu <= 0 or non-finite z, RangeError for
/// |z| > policy.arg_bound, ConvergenceError when max_terms is exhausted.
double mittag_leffler(double mu, double z, const MlEvalPolicy& policy = {});

}  // namespace hilfer
