#pragma once

#include <cstddef>
#include <vector>

#include "dckit/expr.hpp"

namespace dckit {

/// Largest derivative order supported by the Taylor evaluators.
inline constexpr std::size_t kMaxTaylorOrder = 30;

/// Truncated Taylor polynomial in one variable t or two variables (s, t), total degree <= order.
/// Coefficients are Taylor coefficients (derivative / factorials).
class TaylorPoly {
public:
    TaylorPoly(int dim, std::size_t order);

    static TaylorPoly constant(int dim, std::size_t order, double c);
    /// base + d1 * s + d2 * t in two variables; base + d1 * t in one (d2 ignored).
    static TaylorPoly affine(int dim, std::size_t order, double base, double d1, double d2 = 0.0);

    int dim() const noexcept { return dim_; }
    std::size_t order() const noexcept { return order_; }
    /// Coefficient of s^i t^j (two variables) or t^i (one variable, j = 0).
    double operator()(std::size_t i, std::size_t j = 0) const { return c_[i * (order_ + 1) + j]; }
    double& operator()(std::size_t i, std::size_t j = 0) { return c_[i * (order_ + 1) + j]; }

    TaylorPoly& operator+=(const TaylorPoly& b);
    TaylorPoly& operator-=(const TaylorPoly& b);
    TaylorPoly operator-() const;
    friend TaylorPoly operator+(TaylorPoly a, const TaylorPoly& b) { return a += b; }
    friend TaylorPoly operator-(TaylorPoly a, const TaylorPoly& b) { return a -= b; }
    friend TaylorPoly operator*(const TaylorPoly& a, const TaylorPoly& b);
    /// DomainError if b has zero constant term.
    friend TaylorPoly operator/(const TaylorPoly& a, const TaylorPoly& b);

    friend TaylorPoly exp(const TaylorPoly& u);
    /// DomainError unless the constant term is positive.
    friend TaylorPoly log(const TaylorPoly& u);
    friend TaylorPoly sin(const TaylorPoly& u);
    friend TaylorPoly cos(const TaylorPoly& u);
    friend TaylorPoly pow(const TaylorPoly& u, unsigned n);

private:
    std::size_t jmax(std::size_t i) const noexcept { return dim_ == 1 ? 0 : order_ - i; }
    void sincos(TaylorPoly& s, TaylorPoly& c) const;

    int dim_;
    std::size_t order_;
    std::vector<double> c_;
};

/// Evaluate e with x and y replaced by the given polynomials.
TaylorPoly evaluate(const Expr& e, const TaylorPoly& x, const TaylorPoly& y);

/// d_v^k f(p) for 0 <= k <= order, by Taylor propagation along t -> f(p + t v).
/// OrderTooLarge beyond kMaxTaylorOrder; DomainError propagates.
std::vector<double> taylor_jet(const Expr& e, double x, double y, double vx, double vy, std::size_t order);
inline std::vector<double> taylor_jet(const Expr& e, double x, std::size_t order) {
    return taylor_jet(e, x, 0.0, 1.0, 0.0, order);
}

/// Mixed partials d1^a d2^b f(x, y) for a + b <= order, stored at [a * (order + 1) + b].
std::vector<double> mixed_partials(const Expr& e, double x, double y, std::size_t order);

} // namespace dckit
