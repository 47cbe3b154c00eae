#pragma once

#include "hilfer/solver.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace hilfer {

/// Invalid problem file; `key()` is the JSON path of the offending entry.
class ProblemFileError : public Error {
public:
    ProblemFileError(const std::string& key, const std::string& what)
        : Error(key + ": " + what), key_(key) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// A loaded problem. Numeric entries may be JSON numbers or constant
/// expressions in the rhs grammar ("e", "lam/20*E(0.5, 1)"), evaluated after
/// parameter substitution.
struct ProblemFile {
    CauchyProblem problem;
    ParamMap parameters;
    std::string rhs_text;
    std::optional<Expr> phi;
    std::string phi_text;
    std::optional<double> lambda_phi;
};

/// Parses JSON text. `overrides` replace (or add) entries of "parameters".
/// Throws ProblemFileError naming the key for every schema or validation failure.
ProblemFile parse_problem(const std::string& json_text, const ParamMap& overrides = {});

/// Reads and parses a file; unreadable files raise ProblemFileError with key "<file>".
ProblemFile load_problem(const std::filesystem::path& path, const ParamMap& overrides = {});

}  // namespace hilfer
