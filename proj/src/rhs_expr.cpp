#include "hilfer/rhs_expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>

namespace hilfer {

namespace {

using NodePtr = Expr::NodePtr;
using Node = Expr::Node;

struct FuncInfo {
    std::string_view name;
    ExprFunc func;
    int arity;
};

constexpr std::array<FuncInfo, 9> kFunctions = {{
    {"exp", ExprFunc::exp, 1},
    {"ln", ExprFunc::ln, 1},
    {"cos", ExprFunc::cos, 1},
    {"sin", ExprFunc::sin, 1},
    {"sqrt", ExprFunc::sqrt, 1},
    {"abs", ExprFunc::abs, 1},
    {"erf", ExprFunc::erf, 1},
    {"gamma", ExprFunc::gamma, 1},
    {"E", ExprFunc::mittag_leffler, 2},
}};

const FuncInfo* find_function(std::string_view name) {
    for (const auto& f : kFunctions)
        if (f.name == name) return &f;
    return nullptr;
}

const FuncInfo& info(ExprFunc func) {
    for (const auto& f : kFunctions)
        if (f.func == func) return f;
    return kFunctions[0];
}

bool is_reserved(std::string_view name) {
    return name == "t" || name == "y" || name == "d" || name == "pi" || name == "e" ||
           find_function(name) != nullptr;
}

NodePtr make(ExprKind kind, std::vector<NodePtr> args = {}, double value = 0.0,
             ExprFunc func = ExprFunc::exp) {
    return std::make_shared<const Node>(Node{kind, value, func, std::move(args)});
}

class Parser {
public:
    Parser(std::string_view src, const ParamMap& params) : src_(src), params_(params) {}

    NodePtr parse_all() {
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError("empty expression", pos_);
        NodePtr e = parse_expr();
        skip_ws();
        if (pos_ < src_.size()) {
            if (src_[pos_] == ')') throw ParseError("unbalanced ')'", pos_);
            throw ParseError("unexpected '" + std::string(1, src_[pos_]) + "'", pos_);
        }
        return e;
    }

private:
    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c, std::size_t open_at) {
        if (!accept(c)) {
            if (c == ')') throw ParseError("unbalanced '(' opened", open_at);
            throw ParseError(std::string("expected '") + c + "'", pos_);
        }
    }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        for (;;) {
            if (accept('+'))
                lhs = make(ExprKind::add, {lhs, parse_term()});
            else if (accept('-'))
                lhs = make(ExprKind::sub, {lhs, parse_term()});
            else
                return lhs;
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_unary();
        for (;;) {
            if (accept('*'))
                lhs = make(ExprKind::mul, {lhs, parse_unary()});
            else if (accept('/'))
                lhs = make(ExprKind::div, {lhs, parse_unary()});
            else
                return lhs;
        }
    }

    NodePtr parse_unary() {
        if (accept('-')) return make(ExprKind::neg, {parse_unary()});
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_primary();
        if (accept('^')) return make(ExprKind::pow, {base, parse_unary()});
        return base;
    }

    NodePtr parse_primary() {
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError("unexpected end of expression", pos_);
        const char c = src_[pos_];
        if (c == '(') {
            const std::size_t open_at = pos_++;
            NodePtr e = parse_expr();
            expect(')', open_at);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        throw ParseError("unexpected '" + std::string(1, c) + "'", pos_);
    }

    NodePtr parse_number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                ++pos_;
                ++n;
            }
            return n;
        };
        std::size_t mantissa = digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            mantissa += digits();
        }
        if (mantissa == 0) throw ParseError("malformed number", start);
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            // Only an exponent if digits follow; otherwise leave 'e'/'E' for the caller.
            std::size_t look = pos_ + 1;
            if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
            if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
                pos_ = look;
                digits();
            }
        }
        double value = 0.0;
        const auto res = std::from_chars(src_.data() + start, src_.data() + pos_, value);
        if (res.ec != std::errc() || res.ptr != src_.data() + pos_ || !std::isfinite(value))
            throw ParseError("malformed number", start);
        return make(ExprKind::literal, {}, value);
    }

    NodePtr parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        const std::string_view name = src_.substr(start, pos_ - start);

        skip_ws();
        const bool is_call = pos_ < src_.size() && src_[pos_] == '(';
        if (is_call) {
            const FuncInfo* f = find_function(name);
            if (!f) throw ParseError("unknown function '" + std::string(name) + "'", start);
            const std::size_t open_at = pos_++;
            std::vector<NodePtr> args;
            if (!accept(')')) {
                args.push_back(parse_expr());
                while (accept(',')) args.push_back(parse_expr());
                expect(')', open_at);
            }
            if (static_cast<int>(args.size()) != f->arity)
                throw ParseError("function '" + std::string(name) + "' takes " +
                                     std::to_string(f->arity) + " argument(s), got " +
                                     std::to_string(args.size()),
                                 start);
            return make(ExprKind::call, std::move(args), 0.0, f->func);
        }
        if (name == "t") return make(ExprKind::var_t);
        if (name == "y") return make(ExprKind::var_y);
        if (name == "d") return make(ExprKind::var_d);
        if (name == "pi") return make(ExprKind::constant_pi);
        if (name == "e") return make(ExprKind::constant_e);
        if (find_function(name))
            throw ParseError("function '" + std::string(name) + "' needs an argument list", start);
        if (auto it = params_.find(name); it != params_.end())
            return make(ExprKind::literal, {}, it->second);
        throw ParseError("unknown identifier '" + std::string(name) + "'", start);
    }

    std::string_view src_;
    const ParamMap& params_;
    std::size_t pos_ = 0;
};

double checked(double v, const char* what, double t) {
    if (!std::isfinite(v)) throw EvalError(std::string(what) + " produced a non-finite value", t);
    return v;
}

double eval_node(const Node& n, double t, double y, double d, const MlEvalPolicy& policy) {
    auto arg = [&](std::size_t i) { return eval_node(*n.args[i], t, y, d, policy); };
    switch (n.kind) {
        case ExprKind::literal:
            return n.value;
        case ExprKind::constant_pi:
            return std::numbers::pi;
        case ExprKind::constant_e:
            return std::numbers::e;
        case ExprKind::var_t:
            return t;
        case ExprKind::var_y:
            return y;
        case ExprKind::var_d:
            return d;
        case ExprKind::add:
            return checked(arg(0) + arg(1), "addition", t);
        case ExprKind::sub:
            return checked(arg(0) - arg(1), "subtraction", t);
        case ExprKind::mul:
            return checked(arg(0) * arg(1), "multiplication", t);
        case ExprKind::div: {
            const double num = arg(0);
            const double den = arg(1);
            if (den == 0.0) throw EvalError("division by zero", t);
            return checked(num / den, "division", t);
        }
        case ExprKind::pow:
            return checked(std::pow(arg(0), arg(1)), "power (negative base with fractional exponent?)", t);
        case ExprKind::neg:
            return -arg(0);
        case ExprKind::call:
            break;
    }
    const double x = arg(0);
    switch (n.func) {
        case ExprFunc::exp:
            return checked(std::exp(x), "exp", t);
        case ExprFunc::ln:
            if (x <= 0.0) throw EvalError("ln of nonpositive value " + std::to_string(x), t);
            return std::log(x);
        case ExprFunc::cos:
            return std::cos(x);
        case ExprFunc::sin:
            return std::sin(x);
        case ExprFunc::sqrt:
            if (x < 0.0) throw EvalError("sqrt of negative value " + std::to_string(x), t);
            return std::sqrt(x);
        case ExprFunc::abs:
            return std::abs(x);
        case ExprFunc::erf:
            return erf_fn(x);
        case ExprFunc::gamma:
            try {
                return checked(gamma_fn(x), "gamma", t);
            } catch (const DomainError& e) {
                throw EvalError(e.what(), t);
            }
        case ExprFunc::mittag_leffler: {
            const double z = arg(1);
            try {
                return mittag_leffler(x, z, policy);
            } catch (const EvalError&) {
                throw;
            } catch (const Error& e) {
                throw EvalError(e.what(), t);
            }
        }
    }
    return 0.0;
}

bool depends(const Node& n, ExprKind var) {
    if (n.kind == var) return true;
    for (const auto& a : n.args)
        if (depends(*a, var)) return true;
    return false;
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", std::abs(v));
    if (std::signbit(v)) return std::string("(-") + buf + ")";
    return buf;
}

void print(const Node& n, std::string& out) {
    auto binary = [&](const char* op) {
        out += '(';
        print(*n.args[0], out);
        out += op;
        print(*n.args[1], out);
        out += ')';
    };
    switch (n.kind) {
        case ExprKind::literal:
            out += format_number(n.value);
            return;
        case ExprKind::constant_pi:
            out += "pi";
            return;
        case ExprKind::constant_e:
            out += "e";
            return;
        case ExprKind::var_t:
            out += 't';
            return;
        case ExprKind::var_y:
            out += 'y';
            return;
        case ExprKind::var_d:
            out += 'd';
            return;
        case ExprKind::add:
            return binary(" + ");
        case ExprKind::sub:
            return binary(" - ");
        case ExprKind::mul:
            return binary(" * ");
        case ExprKind::div:
            return binary(" / ");
        case ExprKind::pow:
            return binary(" ^ ");
        case ExprKind::neg:
            out += "(-";
            print(*n.args[0], out);
            out += ')';
            return;
        case ExprKind::call:
            out += info(n.func).name;
            out += '(';
            for (std::size_t i = 0; i < n.args.size(); ++i) {
                if (i) out += ", ";
                print(*n.args[i], out);
            }
            out += ')';
            return;
    }
}

NodePtr fold(const NodePtr& n, double t, const MlEvalPolicy& policy) {
    if (!depends(*n, ExprKind::var_y) && !depends(*n, ExprKind::var_d)) {
        if (n->kind == ExprKind::literal) return n;
        return make(ExprKind::literal, {}, eval_node(*n, t, 0.0, 0.0, policy));
    }
    std::vector<NodePtr> args;
    args.reserve(n->args.size());
    for (const auto& a : n->args) args.push_back(fold(a, t, policy));
    return make(n->kind, std::move(args), n->value, n->func);
}

}  // namespace

Expr Expr::literal(double v) { return Expr(make(ExprKind::literal, {}, v)); }

double Expr::eval(double t, double y, double d, const MlEvalPolicy& policy) const {
    if (!root_) throw ContractError("evaluating an empty expression");
    return checked(eval_node(*root_, t, y, d, policy), "expression", t);
}

std::string Expr::to_string() const {
    std::string out;
    if (root_) print(*root_, out);
    return out;
}

bool Expr::depends_on_y() const { return root_ && depends(*root_, ExprKind::var_y); }
bool Expr::depends_on_d() const { return root_ && depends(*root_, ExprKind::var_d); }
bool Expr::depends_on_t() const { return root_ && depends(*root_, ExprKind::var_t); }

Expr Expr::bind_t(double t, const MlEvalPolicy& policy) const {
    if (!root_) throw ContractError("binding an empty expression");
    return Expr(fold(root_, t, policy));
}

Expr parse(std::string_view src, const ParamMap& params) {
    for (const auto& [name, value] : params) {
        if (is_reserved(name))
            throw ContractError("parameter name '" + name + "' collides with a reserved word");
        if (!std::isfinite(value))
            throw ContractError("parameter '" + name + "' must be finite");
    }
    return Expr(Parser(src, params).parse_all());
}

}  // namespace hilfer
