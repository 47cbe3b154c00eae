#include "commands.hpp"

#include "hilfer/problem_file.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <unistd.h>

namespace {

using namespace hilfer;
using namespace hilfer::cli;

void add_problem_options(CLI::App* cmd, ProblemArgs& p) {
    cmd->add_option("problem", p.path, "Problem file (JSON)")->required();
    cmd->add_option("--param", p.params, "Override a parameter, name=value (repeatable)");
    cmd->add_option("--n", p.n, "Number of mesh cells")->capture_default_str();
    cmd->add_option("--grade", p.grade, "Mesh grading exponent r >= 1 (default 2/alpha)");
}

int run(int argc, char** argv) {
    CLI::App app{"Solver and stability certifier for psi-Hilfer fractional Cauchy problems"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "hilfer 1.0.0");

    SpecfunArgs sf;
    auto* specfun = app.add_subcommand("specfun", "Evaluate gamma X, erf Z or ml ALPHA Z (12 significant digits)");
    specfun->add_option("function", sf.function, "gamma, erf or ml")->required();
    specfun->add_option("args", sf.args, "Numeric arguments")->required();

    SolveArgs sv;
    auto* solve = app.add_subcommand("solve", "Solve a problem file and write the solution as CSV");
    add_problem_options(solve, sv.problem);
    solve->add_option("--tol", sv.tol, "Picard tolerance on the update norm")->capture_default_str();
    solve->add_option("--max-iter", sv.max_iter, "Picard iteration cap")->capture_default_str();
    solve->add_option("--out", sv.out, "CSV output path (default stdout)");

    CertifyArgs ct;
    auto* certify = app.add_subcommand("certify", "Check the contraction condition and print stability constants");
    add_problem_options(certify, ct.problem);
    certify->add_flag("--json", ct.json, "Machine-readable output");

    PerturbArgs pt;
    auto* perturb = app.add_subcommand("perturb", "Run the perturbation harness against the stability bound");
    add_problem_options(perturb, pt.problem);
    perturb->add_option("--epsilon", pt.epsilon, "Perturbation size")->capture_default_str();
    perturb->add_option("--trials", pt.trials, "Number of trials")->capture_default_str();
    perturb->add_option("--seed", pt.seed, "Base seed")->capture_default_str();
    perturb->add_option("--shape", pt.shape, "zero, constant, phi_scaled or random_bounded")->capture_default_str();
    perturb->add_option("--kind", pt.kind, "uh or uhr (default uhr when phi is given)");
    perturb->add_option("--allowance", pt.allowance, "Discretization allowance")->capture_default_str();
    perturb->add_option("--threads", pt.threads, "Worker threads (0 = hardware)")->capture_default_str();
    perturb->add_option("--out", pt.out, "CSV report path (default stdout)");

    VerifyOpsArgs vo;
    auto* verify = app.add_subcommand("verify-ops", "Refinement study of the fractional operator oracles");
    verify->add_option("--n-list", vo.n_list, "Mesh sizes, increasing")->delimiter(',');
    verify->add_option("--psi", vo.psi, "Restrict to identity, log or power");
    verify->add_option("--alpha", vo.alpha, "Order alpha in (0, 1)")->capture_default_str();
    verify->add_option("--report", vo.report, "Write the residual table as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_input;
    }

    try {
        if (*specfun) return cmd_specfun(sf, std::cout);
        if (*solve) return cmd_solve(sv, std::cout, std::cerr);
        if (*certify) return cmd_certify(ct, std::cout);
        if (*perturb) return cmd_perturb(pt, std::cout, std::cerr);
        const char* no_color = std::getenv("NO_COLOR");
        const bool color = isatty(STDOUT_FILENO) && !(no_color && *no_color);
        return cmd_verify_ops(vo, std::cout, color);
    } catch (const ConvergenceError& e) {
        std::cerr << "error: " << e.what() << " (last update norm " << e.last_update() << ")\n";
        return exit_no_convergence;
    } catch (const CertificationError& e) {
        std::cerr << "not certified: " << e.what() << " (ratio " << e.ratio() << ")\n";
        return exit_not_certified;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_input;
    }
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
