#include "doctest.h"

#include <cmath>
#include <random>

#include "dckit/error.hpp"
#include "dckit/expr.hpp"
#include "dckit/taylor.hpp"

using namespace dckit;

namespace {

double fact(std::size_t k) { return std::tgamma(static_cast<double>(k) + 1); }

double binom(std::size_t n, std::size_t k) { return fact(n) / (fact(k) * fact(n - k)); }

} // namespace

TEST_CASE("parser and evaluation") {
    const auto e = parse_expr("exp(2*x) - sin(y)/3 + x^3");
    CHECK(e.eval(0.7, -0.2) == doctest::Approx(std::exp(1.4) - std::sin(-0.2) / 3 + 0.343));
    CHECK(e.uses('x'));
    CHECK(e.uses('y'));
    CHECK_FALSE(parse_expr("cos(pi*x)").uses('y'));
    CHECK(parse_expr("cos(pi)").eval(0) == doctest::Approx(-1.0));
    CHECK(parse_expr("-x*-2").eval(3) == doctest::Approx(6.0));
    CHECK(parse_expr("1.5e1").eval(0) == 15.0);
    CHECK(parse_expr("2-3-4").eval(0) == -5.0);
    CHECK(parse_expr("8/4/2").eval(0) == 1.0);

    for (const char* text : {"exp(x*y)+log(1+x^2)", "sin(x)/(2+cos(y))", "-(x-y)^4"}) {
        const auto a = parse_expr(text);
        const auto b = parse_expr(a.render());
        CHECK(a.eval(0.3, 0.9) == b.eval(0.3, 0.9));
    }

    CHECK_THROWS_AS(parse_expr("exp(x"), ParseError);
    CHECK_THROWS_AS(parse_expr("x +"), ParseError);
    CHECK_THROWS_AS(parse_expr("tan(x)"), ParseError);
    CHECK_THROWS_AS(parse_expr("z"), ParseError);
    CHECK_THROWS_AS(parse_expr("log(x)").eval(-1.0), DomainError);
    CHECK_THROWS_AS(parse_expr("1/x").eval(0.0), DomainError);
}

TEST_CASE("substitution") {
    const auto f = parse_expr("exp(x) * y");
    const auto g = f.substitute('x', parse_expr("x*y"));
    CHECK(g.eval(0.5, 2.0) == doctest::Approx(std::exp(1.0) * 2.0));
    const auto h = f.substitute('y', Expr::constant(3));
    CHECK_FALSE(h.uses('y'));
    CHECK(h.eval(1.0) == doctest::Approx(3 * std::exp(1.0)));
}

TEST_CASE("1-D derivatives against closed forms") {
    const std::size_t n = 20;
    const double x = 0.3;
    const auto e2 = taylor_jet(parse_expr("exp(2*x)"), x, n);
    const auto s = taylor_jet(parse_expr("sin(x)"), x, n);
    const auto l = taylor_jet(parse_expr("log(x)"), x, n);
    const auto r = taylor_jet(parse_expr("1/(1-x)"), x, n);
    const double cycle[4] = {std::sin(x), std::cos(x), -std::sin(x), -std::cos(x)};
    for (std::size_t k = 0; k <= n; ++k) {
        CHECK(e2[k] == doctest::Approx(std::pow(2.0, static_cast<double>(k)) * std::exp(2 * x)).epsilon(1e-12));
        CHECK(s[k] == doctest::Approx(cycle[k % 4]).epsilon(1e-12));
        CHECK(r[k] == doctest::Approx(fact(k) / std::pow(1 - x, static_cast<double>(k + 1))).epsilon(1e-11));
        if (k == 0)
            CHECK(l[0] == doctest::Approx(std::log(x)));
        else
            CHECK(l[k] == doctest::Approx((k % 2 ? 1.0 : -1.0) * fact(k - 1) / std::pow(x, static_cast<double>(k)))
                              .epsilon(1e-10));
    }
    // polynomials: exact, vanishing past the degree
    const auto p = taylor_jet(parse_expr("(x+1)^5"), 1.0, 8);
    for (std::size_t k = 0; k <= 8; ++k)
        CHECK(p[k] == (k <= 5 ? fact(5) / fact(5 - k) * std::pow(2.0, static_cast<double>(5 - k)) : 0.0));

    CHECK_THROWS_AS(taylor_jet(parse_expr("x"), 0.0, kMaxTaylorOrder + 1), OrderTooLarge);
    CHECK_THROWS_AS(taylor_jet(parse_expr("log(x)"), 0.0, 4), DomainError);
}

TEST_CASE("directional and mixed derivatives") {
    const std::size_t n = 10;
    // f = exp(a x + b y): d1^i d2^j f = a^i b^j f
    const double a = 0.7, b = -1.3, x = 0.2, y = 0.4;
    const auto e = parse_expr("exp(0.7*x - 1.3*y)");
    const auto m = mixed_partials(e, x, y, n);
    const double f0 = std::exp(a * x + b * y);
    for (std::size_t i = 0; i <= n; ++i)
        for (std::size_t j = 0; i + j <= n; ++j)
            CHECK(m[i * (n + 1) + j] ==
                  doctest::Approx(std::pow(a, static_cast<double>(i)) * std::pow(b, static_cast<double>(j)) * f0)
                      .epsilon(1e-12));
    const double vx = 0.6, vy = 0.8;
    const auto d = taylor_jet(e, x, y, vx, vy, n);
    for (std::size_t k = 0; k <= n; ++k)
        CHECK(d[k] == doctest::Approx(std::pow(a * vx + b * vy, static_cast<double>(k)) * f0).epsilon(1e-12));

    // directional derivative as the binomial sum of mixed partials, for a non-separable function
    const auto g = parse_expr("sin(x*y) + x^3*y");
    const auto gm = mixed_partials(g, x, y, n);
    const auto gd = taylor_jet(g, x, y, vx, vy, n);
    for (std::size_t k = 0; k <= n; ++k) {
        double sum = 0;
        for (std::size_t i = 0; i <= k; ++i)
            sum += binom(k, i) * std::pow(vx, static_cast<double>(i)) * std::pow(vy, static_cast<double>(k - i)) *
                   gm[i * (n + 1) + (k - i)];
        CHECK(gd[k] == doctest::Approx(sum).epsilon(1e-10));
    }
}

TEST_CASE("derivatives agree with central differences of the order below") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.2, 1.2);
    for (const char* text : {"exp(x)*sin(3*x)", "log(2+x)/(1+x^2)", "cos(x)^3"}) {
        const auto e = parse_expr(text);
        for (int t = 0; t < 10; ++t) {
            const double x = u(rng), h = 1e-3;
            const auto c = taylor_jet(e, x, 7);
            const auto lo = taylor_jet(e, x - h, 6), hi = taylor_jet(e, x + h, 6);
            const auto lo2 = taylor_jet(e, x - h / 2, 6), hi2 = taylor_jet(e, x + h / 2, 6);
            for (std::size_t k = 1; k <= 6; ++k) {
                const double d1 = (hi[k - 1] - lo[k - 1]) / (2 * h);
                const double d2 = (hi2[k - 1] - lo2[k - 1]) / h;
                const double rich = (4 * d2 - d1) / 3;
                CHECK(std::fabs(rich - c[k]) <= 1e-5 * std::max(1.0, std::fabs(c[k])));
            }
        }
    }
}

TEST_CASE("TaylorPoly arithmetic") {
    const auto t = TaylorPoly::affine(1, 6, 0.0, 1.0);
    const auto one = TaylorPoly::constant(1, 6, 1.0);
    const auto geo = one / (one - t);
    for (std::size_t k = 0; k <= 6; ++k)
        CHECK(geo(k) == doctest::Approx(1.0));
    const auto e = exp(t) * exp(-t);
    CHECK(e(0) == doctest::Approx(1.0));
    for (std::size_t k = 1; k <= 6; ++k)
        CHECK(e(k) == doctest::Approx(0.0).epsilon(1e-15));
    const auto s2 = sin(t) * sin(t) + cos(t) * cos(t);
    CHECK(s2(0) == doctest::Approx(1.0));
    for (std::size_t k = 1; k <= 6; ++k)
        CHECK(std::fabs(s2(k)) < 1e-15);
    CHECK_THROWS_AS(one / t, DomainError);
    CHECK_THROWS_AS(log(t), DomainError);

    const auto s = TaylorPoly::affine(2, 4, 1.0, 1.0, 0.0);
    const auto tt = TaylorPoly::affine(2, 4, 0.0, 0.0, 1.0);
    const auto p = pow(s + tt, 2);
    // (1 + s + t)^2 = 1 + 2s + 2t + s^2 + 2st + t^2
    CHECK(p(0, 0) == 1.0);
    CHECK(p(1, 0) == 2.0);
    CHECK(p(0, 1) == 2.0);
    CHECK(p(1, 1) == 2.0);
    CHECK(p(2, 0) == 1.0);
    CHECK(p(0, 2) == 1.0);
    CHECK(p(3, 0) == 0.0);
}
