#include "heisbcp/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>

namespace heis {

namespace {

const std::map<std::string, Func, std::less<>> kFuncs = {
    {"sqrt", Func::Sqrt}, {"abs", Func::Abs}, {"exp", Func::Exp},
    {"ln", Func::Ln},     {"sin", Func::Sin}, {"cos", Func::Cos},
    {"min", Func::Min},   {"max", Func::Max}, {"pow", Func::Pow},
};

int func_arity(Func f) {
    switch (f) {
        case Func::Min:
        case Func::Max:
        case Func::Pow: return 2;
        default: return 1;
    }
}

const char* func_name(Func f) {
    for (const auto& [name, fn] : kFuncs)
        if (fn == f) return name.c_str();
    return "?";
}

}  // namespace

std::vector<Token> tokenize(const std::string& src) {
    std::vector<Token> out;
    std::size_t i = 0;
    const std::size_t n = src.size();
    while (i < n) {
        const char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            while (i < n && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
            if (i < n && src[i] == '.') {
                ++i;
                while (i < n && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
            }
            if (i < n && (src[i] == 'e' || src[i] == 'E')) {
                std::size_t j = i + 1;
                if (j < n && (src[j] == '+' || src[j] == '-')) ++j;
                if (j < n && std::isdigit(static_cast<unsigned char>(src[j]))) {
                    i = j;
                    while (i < n && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
                }
            }
            const std::string text = src.substr(start, i - start);
            if (text == ".") throw ExprError("invalid number '.'", start);
            out.push_back({Token::Kind::Number, text, start});
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (i < n && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) ++i;
            const std::string text = src.substr(start, i - start);
            const auto kind = kFuncs.count(text) ? Token::Kind::Func : Token::Kind::Ident;
            out.push_back({kind, text, start});
            continue;
        }
        switch (c) {
            case '+': case '-': case '*': case '/': case '^':
                out.push_back({Token::Kind::Op, std::string(1, c), start});
                break;
            case '(': out.push_back({Token::Kind::LParen, "(", start}); break;
            case ')': out.push_back({Token::Kind::RParen, ")", start}); break;
            case ',': out.push_back({Token::Kind::Comma, ",", start}); break;
            default:
                throw ExprError(std::string("unknown character '") + c + "'", start);
        }
        ++i;
    }
    return out;
}

namespace {

ExprPtr make_number(double v) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Number;
    e->number = v;
    return e;
}

ExprPtr make_var(int idx, char label) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Variable;
    e->var = idx;
    e->var_label = label;
    return e;
}

ExprPtr make_neg(ExprPtr a) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Negate;
    e->args = {std::move(a)};
    return e;
}

ExprPtr make_bin(BinOp op, ExprPtr a, ExprPtr b) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Binary;
    e->op = op;
    e->args = {std::move(a), std::move(b)};
    return e;
}

ExprPtr make_call(Func f, std::vector<ExprPtr> args) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Call;
    e->func = f;
    e->args = std::move(args);
    return e;
}

class Parser {
public:
    Parser(const std::vector<Token>& tokens, ExprVars vars) : toks_(tokens), vars_(vars) {}

    ExprPtr run() {
        ExprPtr e = expr();
        if (pos_ != toks_.size())
            throw ExprError("trailing input '" + toks_[pos_].text + "'", toks_[pos_].position);
        return e;
    }

private:
    const std::vector<Token>& toks_;
    ExprVars vars_;
    std::size_t pos_ = 0;

    const Token* peek() const { return pos_ < toks_.size() ? &toks_[pos_] : nullptr; }
    const Token& take() {
        if (pos_ >= toks_.size()) throw ExprError("unexpected end of input", end_pos());
        return toks_[pos_++];
    }
    std::size_t end_pos() const { return toks_.empty() ? 0 : toks_.back().position + toks_.back().text.size(); }

    bool at_op(const char* s) const {
        const Token* t = peek();
        return t && t->kind == Token::Kind::Op && t->text == s;
    }

    ExprPtr expr() {
        ExprPtr lhs = term();
        while (at_op("+") || at_op("-")) {
            const bool add = take().text == "+";
            lhs = make_bin(add ? BinOp::Add : BinOp::Sub, lhs, term());
        }
        return lhs;
    }

    ExprPtr term() {
        ExprPtr lhs = factor();
        while (at_op("*") || at_op("/")) {
            const bool mul = take().text == "*";
            lhs = make_bin(mul ? BinOp::Mul : BinOp::Div, lhs, factor());
        }
        return lhs;
    }

    ExprPtr factor() {
        if (at_op("-")) {
            take();
            return make_neg(factor());
        }
        return power();
    }

    ExprPtr power() {
        ExprPtr base = primary();
        if (at_op("^")) {
            take();
            return make_bin(BinOp::Pow, base, factor());
        }
        return base;
    }

    ExprPtr primary() {
        const Token& t = take();
        switch (t.kind) {
            case Token::Kind::Number: {
                char* end = nullptr;
                const double v = std::strtod(t.text.c_str(), &end);
                if (end == nullptr || *end != '\0')
                    throw ExprError("invalid number '" + t.text + "'", t.position);
                return make_number(v);
            }
            case Token::Kind::Ident: {
                if (vars_ == ExprVars::Radial) {
                    if (t.text == "s") return make_var(0, 's');
                    throw ExprError("variable " + t.text + " not allowed in a radial profile", t.position);
                }
                if (t.text == "x") return make_var(0, 'x');
                if (t.text == "y") return make_var(1, 'y');
                throw ExprError("variable " + t.text + " not allowed in a general profile", t.position);
            }
            case Token::Kind::Func: {
                const Func f = kFuncs.at(t.text);
                const Token& open = take();
                if (open.kind != Token::Kind::LParen)
                    throw ExprError("expected '(' after " + t.text, open.position);
                std::vector<ExprPtr> args;
                args.push_back(expr());
                while (peek() && peek()->kind == Token::Kind::Comma) {
                    take();
                    args.push_back(expr());
                }
                const Token& close = take();
                if (close.kind != Token::Kind::RParen)
                    throw ExprError("expected ')'", close.position);
                if (static_cast<int>(args.size()) != func_arity(f))
                    throw ExprError(t.text + " expects " + std::to_string(func_arity(f)) +
                                        " argument(s), got " + std::to_string(args.size()),
                                    t.position);
                return make_call(f, std::move(args));
            }
            case Token::Kind::LParen: {
                ExprPtr inner = expr();
                const Token& close = take();
                if (close.kind != Token::Kind::RParen)
                    throw ExprError("expected ')'", close.position);
                return inner;
            }
            default:
                throw ExprError("unexpected token '" + t.text + "'", t.position);
        }
    }
};

void print_rec(const Expr& e, std::string& out) {
    switch (e.kind) {
        case Expr::Kind::Number: {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", e.number);
            out += buf;
            break;
        }
        case Expr::Kind::Variable:
            out += e.var_label;
            break;
        case Expr::Kind::Negate:
            out += "(-";
            print_rec(*e.args[0], out);
            out += ")";
            break;
        case Expr::Kind::Binary: {
            const char* op = nullptr;
            switch (e.op) {
                case BinOp::Add: op = "+"; break;
                case BinOp::Sub: op = "-"; break;
                case BinOp::Mul: op = "*"; break;
                case BinOp::Div: op = "/"; break;
                case BinOp::Pow: op = "^"; break;
            }
            out += "(";
            print_rec(*e.args[0], out);
            out += op;
            print_rec(*e.args[1], out);
            out += ")";
            break;
        }
        case Expr::Kind::Call: {
            out += func_name(e.func);
            out += "(";
            for (std::size_t i = 0; i < e.args.size(); ++i) {
                if (i) out += ",";
                print_rec(*e.args[i], out);
            }
            out += ")";
            break;
        }
    }
}

}  // namespace

ExprPtr parse(const std::vector<Token>& tokens, ExprVars vars) {
    if (tokens.empty()) throw ExprError("empty expression", 0);
    return Parser(tokens, vars).run();
}

ExprPtr parse(const std::string& src, ExprVars vars) { return parse(tokenize(src), vars); }

std::string to_string(const Expr& e) {
    std::string out;
    print_rec(e, out);
    return out;
}

bool structurally_equal(const Expr& a, const Expr& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case Expr::Kind::Number: return a.number == b.number;
        case Expr::Kind::Variable: return a.var == b.var;
        case Expr::Kind::Negate: return structurally_equal(*a.args[0], *b.args[0]);
        case Expr::Kind::Binary:
            if (a.op != b.op) return false;
            break;
        case Expr::Kind::Call:
            if (a.func != b.func || a.args.size() != b.args.size()) return false;
            break;
    }
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!structurally_equal(*a.args[i], *b.args[i])) return false;
    return true;
}

namespace {

bool is_integer(double x) { return std::isfinite(x) && x == std::floor(x) && std::abs(x) < 1e15; }

[[noreturn]] void eval_fail(const char* msg, const Expr& e) { throw EvalError(msg, to_string(e)); }

double eval_pow(double base, double expo, const Expr& e) {
    if (base == 0.0 && expo < 0.0) eval_fail("zero raised to a negative power", e);
    if (base < 0.0 && !is_integer(expo)) eval_fail("negative base with non-integer exponent", e);
    return std::pow(base, expo);
}

}  // namespace

double eval(const Expr& e, std::array<double, 2> b) {
    switch (e.kind) {
        case Expr::Kind::Number: return e.number;
        case Expr::Kind::Variable: return b[static_cast<std::size_t>(e.var)];
        case Expr::Kind::Negate: return -eval(*e.args[0], b);
        case Expr::Kind::Binary: {
            const double u = eval(*e.args[0], b);
            const double w = eval(*e.args[1], b);
            switch (e.op) {
                case BinOp::Add: return u + w;
                case BinOp::Sub: return u - w;
                case BinOp::Mul: return u * w;
                case BinOp::Div:
                    if (w == 0.0) eval_fail("division by zero", e);
                    return u / w;
                case BinOp::Pow: return eval_pow(u, w, e);
            }
            break;
        }
        case Expr::Kind::Call: {
            const double u = eval(*e.args[0], b);
            switch (e.func) {
                case Func::Sqrt:
                    if (u < 0.0) eval_fail("sqrt of a negative value", e);
                    return std::sqrt(u);
                case Func::Abs: return std::abs(u);
                case Func::Exp: return std::exp(u);
                case Func::Ln:
                    if (u <= 0.0) eval_fail("ln of a non-positive value", e);
                    return std::log(u);
                case Func::Sin: return std::sin(u);
                case Func::Cos: return std::cos(u);
                case Func::Min: return std::min(u, eval(*e.args[1], b));
                case Func::Max: return std::max(u, eval(*e.args[1], b));
                case Func::Pow: return eval_pow(u, eval(*e.args[1], b), e);
            }
            break;
        }
    }
    eval_fail("malformed expression node", e);
}

namespace {

struct Dual {
    double v;
    double dx;
    double dy;
};

Dual dual_pow(Dual u, Dual w, const Expr& e) {
    if (u.v == 0.0 && w.v < 0.0) eval_fail("zero raised to a negative power", e);
    if (u.v < 0.0 && !is_integer(w.v)) eval_fail("negative base with non-integer exponent", e);
    const double val = std::pow(u.v, w.v);
    // d(u^w) = u^w * (w' ln u + w u'/u); each half only when it contributes.
    double cx = 0.0, cy = 0.0;
    if (u.dx != 0.0 || u.dy != 0.0) {
        if (u.v == 0.0) {
            if (w.v < 1.0) eval_fail("derivative of pow singular at zero base", e);
            if (w.v == 1.0) {
                cx += u.dx;
                cy += u.dy;
            }
            // w.v > 1: derivative contribution vanishes
        } else {
            const double k = w.v * std::pow(u.v, w.v - 1.0);
            cx += k * u.dx;
            cy += k * u.dy;
        }
    }
    if (w.dx != 0.0 || w.dy != 0.0) {
        if (u.v <= 0.0) eval_fail("derivative w.r.t. exponent needs a positive base", e);
        const double k = val * std::log(u.v);
        cx += k * w.dx;
        cy += k * w.dy;
    }
    return {val, cx, cy};
}

Dual dual_rec(const Expr& e, std::array<double, 2> b) {
    switch (e.kind) {
        case Expr::Kind::Number: return {e.number, 0.0, 0.0};
        case Expr::Kind::Variable:
            return {b[static_cast<std::size_t>(e.var)], e.var == 0 ? 1.0 : 0.0, e.var == 1 ? 1.0 : 0.0};
        case Expr::Kind::Negate: {
            const Dual a = dual_rec(*e.args[0], b);
            return {-a.v, -a.dx, -a.dy};
        }
        case Expr::Kind::Binary: {
            const Dual u = dual_rec(*e.args[0], b);
            const Dual w = dual_rec(*e.args[1], b);
            switch (e.op) {
                case BinOp::Add: return {u.v + w.v, u.dx + w.dx, u.dy + w.dy};
                case BinOp::Sub: return {u.v - w.v, u.dx - w.dx, u.dy - w.dy};
                case BinOp::Mul:
                    return {u.v * w.v, u.dx * w.v + u.v * w.dx, u.dy * w.v + u.v * w.dy};
                case BinOp::Div: {
                    if (w.v == 0.0) eval_fail("division by zero", e);
                    const double inv = 1.0 / w.v;
                    return {u.v * inv, (u.dx - u.v * inv * w.dx) * inv, (u.dy - u.v * inv * w.dy) * inv};
                }
                case BinOp::Pow: return dual_pow(u, w, e);
            }
            break;
        }
        case Expr::Kind::Call: {
            const Dual u = dual_rec(*e.args[0], b);
            switch (e.func) {
                case Func::Sqrt: {
                    if (u.v < 0.0) eval_fail("sqrt of a negative value", e);
                    const double r = std::sqrt(u.v);
                    if (u.v == 0.0) {
                        if (u.dx != 0.0 || u.dy != 0.0)
                            eval_fail("derivative of sqrt singular at zero", e);
                        return {0.0, 0.0, 0.0};
                    }
                    const double k = 0.5 / r;
                    return {r, k * u.dx, k * u.dy};
                }
                case Func::Abs: {
                    // subderivative 0 at the kink
                    const double sg = u.v > 0.0 ? 1.0 : (u.v < 0.0 ? -1.0 : 0.0);
                    return {std::abs(u.v), sg * u.dx, sg * u.dy};
                }
                case Func::Exp: {
                    const double r = std::exp(u.v);
                    return {r, r * u.dx, r * u.dy};
                }
                case Func::Ln: {
                    if (u.v <= 0.0) eval_fail("ln of a non-positive value", e);
                    const double k = 1.0 / u.v;
                    return {std::log(u.v), k * u.dx, k * u.dy};
                }
                case Func::Sin: {
                    const double k = std::cos(u.v);
                    return {std::sin(u.v), k * u.dx, k * u.dy};
                }
                case Func::Cos: {
                    const double k = -std::sin(u.v);
                    return {std::cos(u.v), k * u.dx, k * u.dy};
                }
                case Func::Min: {
                    const Dual w = dual_rec(*e.args[1], b);
                    return u.v <= w.v ? u : w;
                }
                case Func::Max: {
                    const Dual w = dual_rec(*e.args[1], b);
                    return u.v >= w.v ? u : w;
                }
                case Func::Pow: return dual_pow(u, dual_rec(*e.args[1], b), e);
            }
            break;
        }
    }
    eval_fail("malformed expression node", e);
}

}  // namespace

DualValue eval_dual(const Expr& e, std::array<double, 2> bindings, ExprVars vars) {
    const Dual d = dual_rec(e, bindings);
    DualValue out;
    out.value = d.v;
    out.partials = {d.dx, d.dy};
    out.var_count = vars == ExprVars::Radial ? 1 : 2;
    return out;
}

}  // namespace heis
