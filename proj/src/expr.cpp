#include "dckit/expr.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "dckit/decimal.hpp"
#include "dckit/error.hpp"

namespace dckit {

struct Expr::Node {
    Op op = Op::Const;
    double value = 0.0;
    unsigned exponent = 0;
    std::vector<Expr> kids;
};

Expr Expr::constant(double c) {
    auto n = std::make_shared<Node>();
    n->op = Op::Const;
    n->value = c;
    return Expr(n);
}

Expr Expr::x() {
    auto n = std::make_shared<Node>();
    n->op = Op::X;
    return Expr(n);
}

Expr Expr::y() {
    auto n = std::make_shared<Node>();
    n->op = Op::Y;
    return Expr(n);
}

Expr Expr::unary(Op op, const Expr& a) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->kids = {a};
    return Expr(n);
}

Expr Expr::binary(Op op, const Expr& a, const Expr& b) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->kids = {a, b};
    return Expr(n);
}

Expr Expr::power(const Expr& a, unsigned e) {
    auto n = std::make_shared<Node>();
    n->op = Op::Pow;
    n->exponent = e;
    n->kids = {a};
    return Expr(n);
}

Expr::Op Expr::op() const noexcept { return node_->op; }
double Expr::value() const noexcept { return node_->value; }
unsigned Expr::exponent() const noexcept { return node_->exponent; }

const Expr& Expr::lhs() const { return node_->kids.at(0); }
const Expr& Expr::rhs() const { return node_->kids.at(1); }

double Expr::eval(double x, double y) const {
    const Node& n = *node_;
    switch (n.op) {
    case Op::Const:
        return n.value;
    case Op::X:
        return x;
    case Op::Y:
        return y;
    case Op::Add:
        return lhs().eval(x, y) + rhs().eval(x, y);
    case Op::Sub:
        return lhs().eval(x, y) - rhs().eval(x, y);
    case Op::Mul:
        return lhs().eval(x, y) * rhs().eval(x, y);
    case Op::Div: {
        const double d = rhs().eval(x, y);
        if (d == 0.0)
            throw DomainError("division by zero");
        return lhs().eval(x, y) / d;
    }
    case Op::Neg:
        return -lhs().eval(x, y);
    case Op::Pow: {
        const double base = lhs().eval(x, y);
        double r = 1.0;
        for (unsigned i = 0; i < n.exponent; ++i)
            r *= base;
        return r;
    }
    case Op::Exp:
        return std::exp(lhs().eval(x, y));
    case Op::Sin:
        return std::sin(lhs().eval(x, y));
    case Op::Cos:
        return std::cos(lhs().eval(x, y));
    case Op::Log: {
        const double a = lhs().eval(x, y);
        if (!(a > 0.0))
            throw DomainError("log of a non-positive value");
        return std::log(a);
    }
    }
    return 0.0;
}

bool Expr::uses(char var) const {
    const Node& n = *node_;
    if (n.op == Op::X)
        return var == 'x';
    if (n.op == Op::Y)
        return var == 'y';
    for (const auto& k : n.kids)
        if (k.uses(var))
            return true;
    return false;
}

Expr Expr::substitute(char var, const Expr& e) const {
    const Node& n = *node_;
    if ((n.op == Op::X && var == 'x') || (n.op == Op::Y && var == 'y'))
        return e;
    if (n.kids.empty())
        return *this;
    auto copy = std::make_shared<Node>(n);
    for (auto& k : copy->kids)
        k = k.substitute(var, e);
    return Expr(copy);
}

std::string Expr::render() const {
    const Node& n = *node_;
    switch (n.op) {
    case Op::Const: {
        const std::string s = format_double(std::fabs(n.value));
        return n.value < 0 || std::signbit(n.value) ? "(-" + s + ")" : s;
    }
    case Op::X:
        return "x";
    case Op::Y:
        return "y";
    case Op::Add:
        return "(" + lhs().render() + "+" + rhs().render() + ")";
    case Op::Sub:
        return "(" + lhs().render() + "-" + rhs().render() + ")";
    case Op::Mul:
        return "(" + lhs().render() + "*" + rhs().render() + ")";
    case Op::Div:
        return "(" + lhs().render() + "/" + rhs().render() + ")";
    case Op::Neg:
        return "(-" + lhs().render() + ")";
    case Op::Pow:
        return "(" + lhs().render() + "^" + std::to_string(n.exponent) + ")";
    case Op::Exp:
        return "exp(" + lhs().render() + ")";
    case Op::Sin:
        return "sin(" + lhs().render() + ")";
    case Op::Cos:
        return "cos(" + lhs().render() + ")";
    case Op::Log:
        return "log(" + lhs().render() + ")";
    }
    return "";
}

namespace {

class ExprParser {
public:
    explicit ExprParser(std::string_view t) : text_(t) {}

    Expr parse() {
        Expr e = expr();
        skip();
        if (pos_ != text_.size())
            throw ParseError(pos_, "operator or end of input");
        return e;
    }

private:
    void skip() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t'))
            ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c))
            throw ParseError(pos_, std::string("\"") + c + "\"");
    }

    Expr expr() {
        Expr e = term();
        while (true) {
            if (accept('+'))
                e = e + term();
            else if (accept('-'))
                e = e - term();
            else
                return e;
        }
    }

    Expr term() {
        Expr e = unary();
        while (true) {
            if (accept('*'))
                e = e * unary();
            else if (accept('/'))
                e = e / unary();
            else
                return e;
        }
    }

    Expr unary() {
        if (accept('-'))
            return -unary();
        if (accept('+'))
            return unary();
        return power();
    }

    Expr power() {
        Expr base = primary();
        if (accept('^')) {
            skip();
            const std::size_t start = pos_;
            unsigned long n = 0;
            while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') {
                n = n * 10 + static_cast<unsigned long>(text_[pos_] - '0');
                if (n > 1000)
                    throw ParseError(start, "exponent at most 1000");
                ++pos_;
            }
            if (pos_ == start)
                throw ParseError(start, "non-negative integer exponent");
            return Expr::power(base, static_cast<unsigned>(n));
        }
        return base;
    }

    bool keyword(std::string_view word) {
        if (text_.substr(pos_, word.size()) != word)
            return false;
        const std::size_t end = pos_ + word.size();
        if (end < text_.size() && ((text_[end] >= 'a' && text_[end] <= 'z') || (text_[end] >= '0' && text_[end] <= '9')))
            return false;
        pos_ = end;
        return true;
    }

    Expr primary() {
        skip();
        if (pos_ >= text_.size())
            throw ParseError(pos_, "operand");
        if (accept('(')) {
            Expr e = expr();
            expect(')');
            return e;
        }
        const char c = text_[pos_];
        if ((c >= '0' && c <= '9') || c == '.') {
            auto tok = scan_decimal(text_, pos_);
            if (!tok || !tok->value)
                throw ParseError(pos_, "finite number");
            return Expr::constant(*tok->value);
        }
        static constexpr std::pair<std::string_view, Expr::Op> functions[] = {
            {"exp", Expr::Op::Exp}, {"sin", Expr::Op::Sin}, {"cos", Expr::Op::Cos}, {"log", Expr::Op::Log}};
        for (const auto& [name, op] : functions) {
            if (keyword(name)) {
                expect('(');
                Expr e = expr();
                expect(')');
                return Expr::unary(op, e);
            }
        }
        if (keyword("pi"))
            return Expr::constant(std::numbers::pi);
        if (keyword("x"))
            return Expr::x();
        if (keyword("y"))
            return Expr::y();
        throw ParseError(pos_, "number, variable, function or \"(\"");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

} // namespace

Expr parse_expr(std::string_view text) { return ExprParser(text).parse(); }

} // namespace dckit
