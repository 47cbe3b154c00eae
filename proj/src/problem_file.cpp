#include "hilfer/problem_file.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace hilfer {

namespace {

using json = nlohmann::json;

void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ProblemFileError(where.empty() ? it.key() : where + "." + it.key(), "unknown key");
}

double constant(const json& v, const std::string& key, const ParamMap& params) {
    if (v.is_number()) {
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw ProblemFileError(key, "must be finite");
        return d;
    }
    if (!v.is_string()) throw ProblemFileError(key, "must be a number or a constant expression");
    Expr e;
    try {
        e = parse(v.get<std::string>(), params);
    } catch (const Error& err) {
        throw ProblemFileError(key, err.what());
    }
    if (e.depends_on_t() || e.depends_on_y() || e.depends_on_d())
        throw ProblemFileError(key, "constant expression may not use t, y or d");
    try {
        return e.eval(0.0, 0.0, 0.0);
    } catch (const Error& err) {
        throw ProblemFileError(key, err.what());
    }
}

const json& require(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ProblemFileError(key, "missing required key");
    return *it;
}

std::string text(const json& v, const std::string& key) {
    if (!v.is_string()) throw ProblemFileError(key, "must be a string");
    return v.get<std::string>();
}

Expr expression(const std::string& src, const std::string& key, const ParamMap& params) {
    try {
        return parse(src, params);
    } catch (const Error& err) {
        throw ProblemFileError(key, err.what());
    }
}

}  // namespace

ProblemFile parse_problem(const std::string& json_text, const ParamMap& overrides) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& err) {
        throw ProblemFileError("<document>", std::string("invalid JSON: ") + err.what());
    }
    if (!doc.is_object()) throw ProblemFileError("<document>", "top level must be an object");
    reject_unknown(doc, "", {"psi", "alpha", "beta", "a", "T", "y_a", "rhs", "lipschitz", "phi",
                             "lambda_phi", "parameters"});

    ProblemFile pf;
    if (auto it = doc.find("parameters"); it != doc.end()) {
        if (!it->is_object()) throw ProblemFileError("parameters", "must be an object");
        for (auto p = it->begin(); p != it->end(); ++p) {
            if (!p.value().is_number())
                throw ProblemFileError("parameters." + p.key(), "must be a number");
            pf.parameters[p.key()] = p.value().get<double>();
        }
    }
    for (const auto& [name, value] : overrides) pf.parameters[name] = value;
    for (const auto& [name, value] : pf.parameters) {
        if (!std::isfinite(value)) throw ProblemFileError("parameters." + name, "must be finite");
        try {
            parse("0", ParamMap{{name, value}});
        } catch (const Error& err) {
            throw ProblemFileError("parameters." + name, err.what());
        }
    }
    const ParamMap& params = pf.parameters;

    CauchyProblem& p = pf.problem;
    const json& psi = require(doc, "psi");
    if (!psi.is_object()) throw ProblemFileError("psi", "must be an object");
    reject_unknown(psi, "psi", {"kind", "rho"});
    const std::string kind = text(require(psi, "kind"), "psi.kind");
    if (kind == "identity") {
        p.psi = PsiMap::identity();
    } else if (kind == "log") {
        p.psi = PsiMap::logarithm();
    } else if (kind == "power") {
        auto rho = psi.find("rho");
        if (rho == psi.end()) throw ProblemFileError("psi.rho", "required for kind \"power\"");
        const double r = constant(*rho, "psi.rho", params);
        try {
            p.psi = PsiMap::power(r);
        } catch (const Error& err) {
            throw ProblemFileError("psi.rho", err.what());
        }
    } else {
        throw ProblemFileError("psi.kind", "expected \"identity\", \"log\" or \"power\", got \"" + kind + "\"");
    }
    if (kind != "power" && psi.contains("rho")) throw ProblemFileError("psi.rho", "only valid for kind \"power\"");

    const double alpha = constant(require(doc, "alpha"), "alpha", params);
    const double beta = constant(require(doc, "beta"), "beta", params);
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ProblemFileError("alpha", "must lie in (0, 1]");
    if (!(beta >= 0.0 && beta <= 1.0)) throw ProblemFileError("beta", "must lie in [0, 1]");
    p.order = FracOrder(alpha, beta);

    p.a = constant(require(doc, "a"), "a", params);
    p.T = constant(require(doc, "T"), "T", params);
    if (!(p.T > p.a)) throw ProblemFileError("T", "must exceed a");
    if (p.psi.kind() == PsiKind::logarithm && p.a < 1.0)
        throw ProblemFileError("a", "psi = ln t needs a >= 1");
    try {
        p.psi.check_interval(p.a, p.T);
    } catch (const Error& err) {
        throw ProblemFileError("a", err.what());
    }
    p.y_a = constant(require(doc, "y_a"), "y_a", params);

    pf.rhs_text = text(require(doc, "rhs"), "rhs");
    p.rhs = expression(pf.rhs_text, "rhs", params);

    if (auto it = doc.find("lipschitz"); it != doc.end()) {
        if (!it->is_object()) throw ProblemFileError("lipschitz", "must be an object");
        reject_unknown(*it, "lipschitz", {"k", "l"});
        if (auto k = it->find("k"); k != it->end()) {
            p.k = constant(*k, "lipschitz.k", params);
            if (*p.k < 0.0) throw ProblemFileError("lipschitz.k", "must be >= 0");
        }
        if (auto l = it->find("l"); l != it->end()) {
            p.l = constant(*l, "lipschitz.l", params);
            if (!(*p.l >= 0.0 && *p.l < 1.0)) throw ProblemFileError("lipschitz.l", "must lie in [0, 1)");
        }
    }

    if (auto it = doc.find("phi"); it != doc.end()) {
        pf.phi_text = text(*it, "phi");
        Expr phi = expression(pf.phi_text, "phi", params);
        if (phi.depends_on_y() || phi.depends_on_d()) throw ProblemFileError("phi", "may depend on t only");
        pf.phi = std::move(phi);
    }
    if (auto it = doc.find("lambda_phi"); it != doc.end()) {
        if (!pf.phi) throw ProblemFileError("lambda_phi", "requires phi");
        pf.lambda_phi = constant(*it, "lambda_phi", params);
        if (!(*pf.lambda_phi > 0.0)) throw ProblemFileError("lambda_phi", "must be positive");
    }

    try {
        p.validate();
    } catch (const Error& err) {
        throw ProblemFileError("<problem>", err.what());
    }
    return pf;
}

ProblemFile load_problem(const std::filesystem::path& path, const ParamMap& overrides) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ProblemFileError("<file>", "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_problem(ss.str(), overrides);
}

}  // namespace hilfer
