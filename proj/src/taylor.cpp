#include "dckit/taylor.hpp"

#include <cmath>
#include <string>

#include "dckit/error.hpp"

namespace dckit {

namespace {

// k! as a double; exact through 22!.
double factorial(std::size_t k) {
    double f = 1.0;
    for (std::size_t i = 2; i <= k; ++i)
        f *= static_cast<double>(i);
    return f;
}

void check_order(std::size_t order) {
    if (order > kMaxTaylorOrder)
        throw OrderTooLarge("derivative order " + std::to_string(order) + " exceeds " +
                            std::to_string(kMaxTaylorOrder));
}

} // namespace

TaylorPoly::TaylorPoly(int dim, std::size_t order)
    : dim_(dim), order_(order), c_((order + 1) * (order + 1), 0.0) {
    check_order(order);
    if (dim != 1 && dim != 2)
        throw InvalidParameter("TaylorPoly dimension must be 1 or 2");
}

TaylorPoly TaylorPoly::constant(int dim, std::size_t order, double c) {
    TaylorPoly p(dim, order);
    p(0, 0) = c;
    return p;
}

TaylorPoly TaylorPoly::affine(int dim, std::size_t order, double base, double d1, double d2) {
    TaylorPoly p = constant(dim, order, base);
    if (order >= 1) {
        if (dim == 1) {
            p(1, 0) = d1;
        } else {
            p(1, 0) = d1;
            p(0, 1) = d2;
        }
    }
    return p;
}

TaylorPoly& TaylorPoly::operator+=(const TaylorPoly& b) {
    for (std::size_t i = 0; i < c_.size(); ++i)
        c_[i] += b.c_[i];
    return *this;
}

TaylorPoly& TaylorPoly::operator-=(const TaylorPoly& b) {
    for (std::size_t i = 0; i < c_.size(); ++i)
        c_[i] -= b.c_[i];
    return *this;
}

TaylorPoly TaylorPoly::operator-() const {
    TaylorPoly r = *this;
    for (double& v : r.c_)
        v = -v;
    return r;
}

TaylorPoly operator*(const TaylorPoly& a, const TaylorPoly& b) {
    TaylorPoly r(a.dim_, a.order_);
    const std::size_t n = a.order_;
    for (std::size_t i = 0; i <= n; ++i)
        for (std::size_t j = 0; j <= a.jmax(i); ++j) {
            double s = 0.0;
            for (std::size_t p = 0; p <= i; ++p)
                for (std::size_t q = 0; q <= j; ++q)
                    s += a(p, q) * b(i - p, j - q);
            r(i, j) = s;
        }
    return r;
}

TaylorPoly operator/(const TaylorPoly& a, const TaylorPoly& b) {
    const double b0 = b(0, 0);
    if (b0 == 0.0)
        throw DomainError("division by a series with zero constant term");
    TaylorPoly q(a.dim_, a.order_);
    const std::size_t n = a.order_;
    for (std::size_t i = 0; i <= n; ++i)
        for (std::size_t j = 0; j <= a.jmax(i); ++j) {
            double s = a(i, j);
            for (std::size_t p = 0; p <= i; ++p)
                for (std::size_t r = 0; r <= j; ++r)
                    if (p + r > 0)
                        s -= b(p, r) * q(i - p, j - r);
            q(i, j) = s / b0;
        }
    return q;
}

// The recurrences below come from the Euler operator E = sum of x_i d/dx_i, which multiplies a
// homogeneous part of degree d by d: E(exp u) = exp(u) E(u), u E(log u) = E(u), and so on.

TaylorPoly exp(const TaylorPoly& u) {
    TaylorPoly h(u.dim_, u.order_);
    const std::size_t n = u.order_;
    h(0, 0) = std::exp(u(0, 0));
    for (std::size_t i = 0; i <= n; ++i)
        for (std::size_t j = 0; j <= u.jmax(i); ++j) {
            if (i + j == 0)
                continue;
            double s = 0.0;
            for (std::size_t p = 0; p <= i; ++p)
                for (std::size_t q = 0; q <= j; ++q)
                    if (p + q > 0)
                        s += static_cast<double>(p + q) * u(p, q) * h(i - p, j - q);
            h(i, j) = s / static_cast<double>(i + j);
        }
    return h;
}

TaylorPoly log(const TaylorPoly& u) {
    const double u0 = u(0, 0);
    if (!(u0 > 0.0))
        throw DomainError("log of a non-positive value");
    TaylorPoly l(u.dim_, u.order_);
    const std::size_t n = u.order_;
    l(0, 0) = std::log(u0);
    for (std::size_t i = 0; i <= n; ++i)
        for (std::size_t j = 0; j <= u.jmax(i); ++j) {
            if (i + j == 0)
                continue;
            const double d = static_cast<double>(i + j);
            double s = d * u(i, j);
            for (std::size_t p = 0; p <= i; ++p)
                for (std::size_t q = 0; q <= j; ++q)
                    if (p + q > 0 && (p != i || q != j))
                        s -= static_cast<double>(p + q) * l(p, q) * u(i - p, j - q);
            l(i, j) = s / (d * u0);
        }
    return l;
}

void TaylorPoly::sincos(TaylorPoly& s, TaylorPoly& c) const {
    const std::size_t n = order_;
    s(0, 0) = std::sin((*this)(0, 0));
    c(0, 0) = std::cos((*this)(0, 0));
    for (std::size_t i = 0; i <= n; ++i)
        for (std::size_t j = 0; j <= jmax(i); ++j) {
            if (i + j == 0)
                continue;
            double ss = 0.0, cc = 0.0;
            for (std::size_t p = 0; p <= i; ++p)
                for (std::size_t q = 0; q <= j; ++q)
                    if (p + q > 0) {
                        const double w = static_cast<double>(p + q) * (*this)(p, q);
                        ss += w * c(i - p, j - q);
                        cc -= w * s(i - p, j - q);
                    }
            const double d = static_cast<double>(i + j);
            s(i, j) = ss / d;
            c(i, j) = cc / d;
        }
}

TaylorPoly sin(const TaylorPoly& u) {
    TaylorPoly s(u.dim_, u.order_), c(u.dim_, u.order_);
    u.sincos(s, c);
    return s;
}

TaylorPoly cos(const TaylorPoly& u) {
    TaylorPoly s(u.dim_, u.order_), c(u.dim_, u.order_);
    u.sincos(s, c);
    return c;
}

TaylorPoly pow(const TaylorPoly& u, unsigned n) {
    TaylorPoly result = TaylorPoly::constant(u.dim_, u.order_, 1.0);
    TaylorPoly base = u;
    while (n > 0) {
        if (n & 1u)
            result = result * base;
        n >>= 1;
        if (n > 0)
            base = base * base;
    }
    return result;
}

TaylorPoly evaluate(const Expr& e, const TaylorPoly& x, const TaylorPoly& y) {
    using Op = Expr::Op;
    switch (e.op()) {
    case Op::Const:
        return TaylorPoly::constant(x.dim(), x.order(), e.value());
    case Op::X:
        return x;
    case Op::Y:
        return y;
    case Op::Add:
        return evaluate(e.lhs(), x, y) + evaluate(e.rhs(), x, y);
    case Op::Sub:
        return evaluate(e.lhs(), x, y) - evaluate(e.rhs(), x, y);
    case Op::Mul:
        return evaluate(e.lhs(), x, y) * evaluate(e.rhs(), x, y);
    case Op::Div:
        return evaluate(e.lhs(), x, y) / evaluate(e.rhs(), x, y);
    case Op::Neg:
        return -evaluate(e.lhs(), x, y);
    case Op::Pow:
        return pow(evaluate(e.lhs(), x, y), e.exponent());
    case Op::Exp:
        return exp(evaluate(e.lhs(), x, y));
    case Op::Sin:
        return sin(evaluate(e.lhs(), x, y));
    case Op::Cos:
        return cos(evaluate(e.lhs(), x, y));
    case Op::Log:
        return log(evaluate(e.lhs(), x, y));
    }
    throw DomainError("unknown expression node");
}

std::vector<double> taylor_jet(const Expr& e, double x, double y, double vx, double vy, std::size_t order) {
    check_order(order);
    const TaylorPoly p = evaluate(e, TaylorPoly::affine(1, order, x, vx), TaylorPoly::affine(1, order, y, vy));
    std::vector<double> d(order + 1);
    for (std::size_t k = 0; k <= order; ++k)
        d[k] = p(k) * factorial(k);
    return d;
}

std::vector<double> mixed_partials(const Expr& e, double x, double y, std::size_t order) {
    check_order(order);
    const TaylorPoly p =
        evaluate(e, TaylorPoly::affine(2, order, x, 1.0, 0.0), TaylorPoly::affine(2, order, y, 0.0, 1.0));
    std::vector<double> d((order + 1) * (order + 1), 0.0);
    for (std::size_t a = 0; a <= order; ++a)
        for (std::size_t b = 0; a + b <= order; ++b)
            d[a * (order + 1) + b] = p(a, b) * factorial(a) * factorial(b);
    return d;
}

} // namespace dckit
