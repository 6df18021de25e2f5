#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

namespace dckit {

/// Immutable expression tree over the variables x and y.
class Expr {
public:
    enum class Op { Const, X, Y, Add, Sub, Mul, Div, Neg, Pow, Exp, Sin, Cos, Log };

    static Expr constant(double c);
    static Expr x();
    static Expr y();
    static Expr unary(Op op, const Expr& a);
    static Expr binary(Op op, const Expr& a, const Expr& b);
    /// a^n for an integer n >= 0.
    static Expr power(const Expr& a, unsigned n);

    Op op() const noexcept;
    double value() const noexcept;    ///< for Const
    unsigned exponent() const noexcept; ///< for Pow
    const Expr& lhs() const;
    const Expr& rhs() const;

    /// Point evaluation; DomainError on log of a non-positive value or division by zero.
    double eval(double x, double y = 0.0) const;
    bool uses(char var) const;
    /// Replace every occurrence of `var` ('x' or 'y') by `e`.
    Expr substitute(char var, const Expr& e) const;
    /// Fully parenthesized text that parse_expr accepts.
    std::string render() const;

private:
    struct Node;
    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

inline Expr operator+(const Expr& a, const Expr& b) { return Expr::binary(Expr::Op::Add, a, b); }
inline Expr operator-(const Expr& a, const Expr& b) { return Expr::binary(Expr::Op::Sub, a, b); }
inline Expr operator*(const Expr& a, const Expr& b) { return Expr::binary(Expr::Op::Mul, a, b); }
inline Expr operator/(const Expr& a, const Expr& b) { return Expr::binary(Expr::Op::Div, a, b); }
inline Expr operator-(const Expr& a) { return Expr::unary(Expr::Op::Neg, a); }
inline Expr exp(const Expr& a) { return Expr::unary(Expr::Op::Exp, a); }
inline Expr sin(const Expr& a) { return Expr::unary(Expr::Op::Sin, a); }
inline Expr cos(const Expr& a) { return Expr::unary(Expr::Op::Cos, a); }
inline Expr log(const Expr& a) { return Expr::unary(Expr::Op::Log, a); }

/// Infix grammar:
///     expr    := term (("+" | "-") term)*
///     term    := unary (("*" | "/") unary)*
///     unary   := ("-" | "+") unary | power
///     power   := primary ("^" digits)?
///     primary := number | "x" | "y" | "pi" | ("exp" | "sin" | "cos" | "log") "(" expr ")" | "(" expr ")"
/// Throws ParseError with the offending position.
Expr parse_expr(std::string_view text);

} // namespace dckit
