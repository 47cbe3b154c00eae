#pragma once

#include "hilfer/errors.hpp"
#include "hilfer/specfun.hpp"

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace hilfer {

/// Parse failure with the byte offset of the offending token.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Domain violation while evaluating an expression; carries the time point.
class EvalError : public Error {
public:
    EvalError(const std::string& what, double t)
        : Error(what + " (t = " + std::to_string(t) + ")"), t_(t) {}
    double t() const noexcept { return t_; }

private:
    double t_;
};

enum class ExprKind {
    literal,
    constant_pi,
    constant_e,
    var_t,
    var_y,
    var_d,
    add,
    sub,
    mul,
    div,
    pow,
    neg,
    call
};

enum class ExprFunc { exp, ln, cos, sin, sqrt, abs, erf, gamma, mittag_leffler };

/// Immutable expression tree for a right-hand side f(t, y, d), where d stands
/// for the Hilfer derivative of y. Nodes are shared, so copies are cheap.
///
/// Grammar (whitespace insignificant):
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := primary ('^' unary)?          right-associative, binds tighter than '-'
///   primary := number | 't' | 'y' | 'd' | 'pi' | 'e' | param
///            | func '(' expr ')' | 'E' '(' expr ',' expr ')' | '(' expr ')'
///   func    := exp | ln | cos | sin | sqrt | abs | erf | gamma
class Expr {
public:
    struct Node;
    using NodePtr = std::shared_ptr<const Node>;

    struct Node {
        ExprKind kind;
        double value = 0.0;
        ExprFunc func = ExprFunc::exp;
        std::vector<NodePtr> args;
    };

    Expr() = default;
    explicit Expr(NodePtr root) : root_(std::move(root)) {}

    static Expr literal(double v);

    bool empty() const noexcept { return !root_; }
    const Node& root() const { return *root_; }

    /// Deterministic evaluation; throws EvalError on domain violations.
    double eval(double t, double y, double d, const MlEvalPolicy& policy = {}) const;

    /// Canonical fully parenthesized text; parse(to_string()) reproduces it.
    std::string to_string() const;

    bool depends_on_y() const;
    bool depends_on_d() const;
    bool depends_on_t() const;

    /// Copy with every subtree that depends only on t folded to a literal.
    Expr bind_t(double t, const MlEvalPolicy& policy = {}) const;

private:
    NodePtr root_;
};

using ParamMap = std::map<std::string, double, std::less<>>;

/// Parses `src`; identifiers found in `params` become literals.
/// Throws ParseError for unknown identifiers, arity mismatch, unbalanced
/// parentheses or trailing input.
Expr parse(std::string_view src, const ParamMap& params = {});

}  // namespace hilfer
