#include "hilfer/problem_file.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>

using namespace hilfer;

namespace {

std::string path(int k) { return std::string(HILFER_SOURCE_DIR) + "/problems/example" + std::to_string(k) + ".json"; }

std::string error_key(const std::string& json) {
    try {
        parse_problem(json);
    } catch (const ProblemFileError& e) {
        return e.key();
    }
    return "<accepted>";
}

const char* kValid = R"({"psi": {"kind": "identity"}, "alpha": 0.5, "beta": 0, "a": 0, "T": 1,
                          "y_a": 1, "rhs": "0.1*y"})";

}  // namespace

TEST_CASE("all shipped examples load") {
    for (int k = 1; k <= 7; ++k) {
        INFO("example " << k);
        const ProblemFile pf = load_problem(path(k));
        CHECK(pf.problem.order.alpha() == 0.5);
        CHECK(pf.problem.y_a == 1.0);
        CHECK(pf.problem.k.has_value());
        CHECK(pf.problem.l.has_value());
        CHECK(pf.phi.has_value() == (k >= 5));
    }
    const ProblemFile e3 = load_problem(path(3));
    CHECK(e3.problem.psi.kind() == PsiKind::logarithm);
    CHECK(e3.problem.T == std::numbers::e);
    const ProblemFile e4 = load_problem(path(4));
    CHECK(e4.problem.order.gamma() == 0.75);
    const ProblemFile e7 = load_problem(path(7), {{"rho", 2.0}});
    CHECK(e7.problem.psi.rho() == 2.0);
    CHECK(*e7.lambda_phi == doctest::Approx(2.0 * std::sqrt(2.0) / (std::sqrt(std::numbers::pi) * 3.0)));
}

TEST_CASE("parameter overrides") {
    const ProblemFile base = load_problem(path(1));
    CHECK(base.parameters.at("lam") == 1.0);
    const ProblemFile hot = load_problem(path(1), {{"lam", 2.0}});
    CHECK(*hot.problem.l == doctest::Approx(0.2));
    CHECK(*hot.problem.k == doctest::Approx(mittag_leffler(0.5, 1.0) / 10.0).epsilon(1e-14));
    CHECK(hot.problem.rhs.eval(1.0, 1.0, 0.0) == doctest::Approx(mittag_leffler(0.5, 1.0) / 10.0).epsilon(1e-14));
}

TEST_CASE("minimal valid document") {
    const ProblemFile pf = parse_problem(kValid);
    CHECK_FALSE(pf.problem.k.has_value());
    CHECK(pf.rhs_text == "0.1*y");
}

TEST_CASE("invalid documents name the offending key") {
    CHECK(error_key("[1, 2]") == "<document>");
    CHECK(error_key("{") == "<document>");
    CHECK(error_key(R"({"psi": {"kind": "identity"}, "alpha": 0.5, "beta": 0, "a": 0, "T": 1, "y_a": 1,
                        "rhs": "y", "colour": 1})") == "colour");
    CHECK(error_key(R"({"psi": {"kind": "identity"}, "alpha": 1.5, "beta": 0, "a": 0, "T": 1, "y_a": 1,
                        "rhs": "y"})") == "alpha");
    CHECK(error_key(R"({"psi": {"kind": "identity"}, "alpha": 0.5, "beta": 2, "a": 0, "T": 1, "y_a": 1,
                        "rhs": "y"})") == "beta");
    CHECK(error_key(R"({"psi": {"kind": "identity"}, "alpha": 0.5, "beta": 0, "a": 1, "T": 1, "y_a": 1,
                        "rhs": "y"})") == "T");
    CHECK(error_key(R"({"psi": {"kind": "log"}, "alpha": 0.5, "beta": 0, "a": 0, "T": 1, "y_a": 1,
                        "rhs": "y"})") == "a");
    CHECK(error_key(R"({"psi": {"kind": "identity"}, "alpha": 0.5, "beta": 0, "a": 0, "T": 1, "y_a": 1,
                        "rhs": "y +* 2"})") == "rhs");
    CHECK(error_key(R"({"psi": {"kind": "identity"}, "alpha": 0.5, "beta": 0, "a": 0, "T": 1, "y_a": 1,
                        "rhs": "y", "lipschitz": {"k": 0.1, "l": 1.0}})") == "lipschitz.l");
    CHECK(error_key(R"({"psi": {"kind": "identity"}, "alpha": 0.5, "beta": 0, "a": 0, "T": 1, "y_a": 1,
                        "rhs": "y", "lipschitz": {"k": -1}})") == "lipschitz.k");
    CHECK(error_key(R"({"psi": {"kind": "power"}, "alpha": 0.5, "beta": 0, "a": 0, "T": 1, "y_a": 1,
                        "rhs": "y"})") == "psi.rho");
    CHECK(error_key(R"({"psi": {"kind": "cubic"}, "alpha": 0.5, "beta": 0, "a": 0, "T": 1, "y_a": 1,
                        "rhs": "y"})") == "psi.kind");
    CHECK(error_key(R"({"psi": {"kind": "identity", "scale": 2}, "alpha": 0.5, "beta": 0, "a": 0, "T": 1,
                        "y_a": 1, "rhs": "y"})") == "psi.scale");
    CHECK(error_key(R"({"psi": {"kind": "identity"}, "alpha": 0.5, "beta": 0, "a": 0, "T": 1,
                        "rhs": "y"})") == "y_a");
    CHECK(error_key(R"({"psi": {"kind": "identity"}, "alpha": "lam", "beta": 0, "a": 0, "T": 1,
                        "y_a": 1, "rhs": "y"})") == "alpha");
    CHECK(error_key(R"({"psi": {"kind": "identity"}, "alpha": "t", "beta": 0, "a": 0, "T": 1,
                        "y_a": 1, "rhs": "y"})") == "alpha");
    CHECK(error_key(R"({"psi": {"kind": "identity"}, "alpha": 0.5, "beta": 0, "a": 0, "T": 1, "y_a": 1,
                        "rhs": "y", "phi": "y + 1"})") == "phi");
    CHECK(error_key(R"({"psi": {"kind": "identity"}, "alpha": 0.5, "beta": 0, "a": 0, "T": 1, "y_a": 1,
                        "rhs": "y", "lambda_phi": 1})") == "lambda_phi");
    CHECK(error_key(R"({"psi": {"kind": "identity"}, "alpha": 0.5, "beta": 0, "a": 0, "T": 1, "y_a": 1,
                        "rhs": "y", "parameters": {"lam": "big"}})") == "parameters.lam");
    CHECK(error_key(R"({"psi": {"kind": "identity"}, "alpha": 0.5, "beta": 0, "a": 0, "T": 1, "y_a": 1,
                        "rhs": "y", "parameters": {"t": 1}})") == "parameters.t");
}

TEST_CASE("unreadable files") {
    try {
        load_problem("/nonexistent/problem.json");
        FAIL("expected ProblemFileError");
    } catch (const ProblemFileError& e) {
        CHECK(e.key() == "<file>");
    }
}
