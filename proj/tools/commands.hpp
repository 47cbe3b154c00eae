#pragma once

#include "hilfer/rhs_expr.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hilfer::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_input = 2,
    exit_no_convergence = 3,
    exit_not_certified = 4,
    exit_oracle_failure = 5,
};

/// Options shared by the commands that read a problem file.
struct ProblemArgs {
    std::string path;
    std::vector<std::string> params;  // "name=value"
    std::size_t n = 256;
    std::optional<double> grade;
};

/// Parses "name=value" overrides. Throws ProblemFileError with key "--param".
ParamMap parse_overrides(const std::vector<std::string>& items);

struct SpecfunArgs {
    std::string function;  // gamma, erf, ml
    std::vector<double> args;
};

struct SolveArgs {
    ProblemArgs problem;
    double tol = 1e-12;
    int max_iter = 500;
    std::string out;
};

struct CertifyArgs {
    ProblemArgs problem;
    bool json = false;
};

struct PerturbArgs {
    ProblemArgs problem;
    double epsilon = 1e-2;
    int trials = 20;
    std::uint64_t seed = 1;
    std::string shape = "constant";
    std::string kind;  // "", "uh" or "uhr"
    double allowance = 0.05;
    unsigned threads = 0;
    std::string out;
};

struct VerifyOpsArgs {
    std::vector<std::size_t> n_list{64, 128, 256, 512};
    std::string psi;  // empty = all families
    double alpha = 0.5;
    std::string report;
};

int cmd_specfun(const SpecfunArgs& args, std::ostream& out);
int cmd_solve(const SolveArgs& args, std::ostream& out, std::ostream& log);
int cmd_certify(const CertifyArgs& args, std::ostream& out);
int cmd_perturb(const PerturbArgs& args, std::ostream& out, std::ostream& log);
int cmd_verify_ops(const VerifyOpsArgs& args, std::ostream& out, bool color);

}  // namespace hilfer::cli
