#pragma once

/*
 * Small arithmetic expression language for profile functions.
 *
 * Grammar:
 *   expr    := term (('+'|'-') term)*
 *   term    := factor (('*'|'/') factor)*
 *   factor  := '-' factor | power
 *   power   := primary ('^' factor)?          ('^' right-associative,
 *                                              unary minus binds looser: -s^2 = -(s^2))
 *   primary := number | variable | func '(' expr (',' expr)* ')' | '(' expr ')'
 *
 * Functions: sqrt, abs, exp, ln, sin, cos (unary); min, max, pow (binary).
 * Variables: radial profiles use s, general profiles use x and y.
 */

#include <array>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace heis {

enum class ExprVars { Radial, General };  // radial: {s}, general: {x,y}

struct ExprError : std::runtime_error {
    std::size_t position;
    ExprError(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg + " (at position " + std::to_string(pos) + ")"), position(pos) {}
};

struct EvalError : std::runtime_error {
    std::string subexpr;
    EvalError(const std::string& msg, std::string sub)
        : std::runtime_error(msg + " in '" + sub + "'"), subexpr(std::move(sub)) {}
};

struct Token {
    enum class Kind { Number, Ident, Op, LParen, RParen, Comma, Func };
    Kind kind;
    std::string text;
    std::size_t position;
};

std::vector<Token> tokenize(const std::string& src);

enum class BinOp { Add, Sub, Mul, Div, Pow };
enum class Func { Sqrt, Abs, Exp, Ln, Sin, Cos, Min, Max, Pow };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Kind { Number, Variable, Negate, Binary, Call };
    Kind kind;
    double number = 0.0;
    int var = 0;  // 0: s or x, 1: y
    char var_label = 's';
    BinOp op = BinOp::Add;
    Func func = Func::Sqrt;
    std::vector<ExprPtr> args;
};

ExprPtr parse(const std::vector<Token>& tokens, ExprVars vars);
ExprPtr parse(const std::string& src, ExprVars vars);

std::string to_string(const Expr& e);
bool structurally_equal(const Expr& a, const Expr& b);

// Value with exact forward-mode partials, one per declared variable.
struct DualValue {
    double value = 0.0;
    std::array<double, 2> partials{0.0, 0.0};
    int var_count = 1;
};

// bindings[0] = s or x, bindings[1] = y (general kind only).
double eval(const Expr& e, std::array<double, 2> bindings);
DualValue eval_dual(const Expr& e, std::array<double, 2> bindings, ExprVars vars);

inline double eval_radial(const Expr& e, double s) { return eval(e, {s, 0.0}); }

}  // namespace heis
