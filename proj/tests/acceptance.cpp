// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "dckit/analysis.hpp"
#include "dckit/constructions.hpp"
#include "dckit/jetnorms.hpp"
#include "dckit/jets.hpp"
#include "dckit/taylor.hpp"

using namespace dckit;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, bool ok, double seconds, const std::string& detail) {
    std::printf("%s criterion %d (%.3f s): %s\n", ok ? "PASS" : "FAIL", id, seconds, detail.c_str());
    std::fflush(stdout);
    if (!ok)
        ++failures;
}

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

std::vector<double> random_logs(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::vector<double> v(n);
    for (auto& x : v)
        x = u(rng);
    return v;
}

void criterion1() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(101);
    double worst = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t kmax = 2 + rng() % 23;
        const auto logs = random_logs(rng, kmax + 1);
        std::vector<double> w(kmax + 1);
        for (std::size_t k = 0; k <= kmax; ++k)
            w[k] = logs[k] + log_factorial(k);
        const auto lc = log_convex_minorant(WeightSequence::explicit_logs(logs), kmax);
        for (std::size_t k = 0; k <= kmax; ++k) {
            // inf over j <= k <= l, j < l of (j! M_j)^((l-k)/(l-j)) (l! M_l)^((k-j)/(l-j))
            double inf = kInf;
            for (std::size_t j = 0; j <= k; ++j)
                for (std::size_t l = std::max(k, j + 1); l <= kmax; ++l)
                    inf = std::min(inf, (static_cast<double>(l - k) * w[j] + static_cast<double>(k - j) * w[l]) /
                                            static_cast<double>(l - j));
            worst = std::max(worst, std::fabs(lc.logs[k] - inf) / std::max(1.0, std::fabs(inf)));
        }
    }
    const double s = since(t0);
    report(1, worst <= 1e-9 && s < 5.0, s, fmt("max relative log deviation %.3g over 50 sequences", worst));
}

void criterion2() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(202);
    double worst = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto lm = random_logs(rng, 13), ll = random_logs(rng, 13);
        const auto got = compose_weights(WeightSequence::explicit_logs(lm), WeightSequence::explicit_logs(ll), 12);
        for (std::size_t k = 1; k <= 12; ++k) {
            double best = -kInf;
            std::function<void(std::size_t, std::size_t, double)> rec = [&](std::size_t left, std::size_t parts,
                                                                             double acc) {
                if (left == 0) {
                    best = std::max(best, lm[parts] + acc);
                    return;
                }
                for (std::size_t a = 1; a <= left; ++a)
                    rec(left - a, parts + 1, acc + ll[a]);
            };
            rec(k, 0, 0.0);
            worst = std::max(worst, ulp_distance(got[k], best, std::max(1.0, std::fabs(best))));
        }
    }
    const double s = since(t0);
    report(2, worst <= 8 && s < 10.0, s, fmt("max deviation %.0f ulp over 20 pairs, k <= 12", worst));
}

// Truncated composition by repeated polynomial multiplication in long double, derivative convention.
std::vector<long double> naive_compose(const std::vector<double>& f, const std::vector<double>& g) {
    const std::size_t n = std::min(f.size(), g.size());
    std::vector<long double> a(n), b(n), fact(n, 1);
    for (std::size_t k = 1; k < n; ++k)
        fact[k] = fact[k - 1] * static_cast<long double>(k);
    for (std::size_t k = 0; k < n; ++k) {
        a[k] = f[k] / fact[k];
        b[k] = g[k] / fact[k];
    }
    std::vector<long double> out(n, 0), power(n, 0);
    power[0] = 1;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k)
            out[k] += a[j] * power[k];
        std::vector<long double> next(n, 0);
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = 0; p + q < n; ++q)
                next[p + q] += power[p] * b[q];
        power = next;
    }
    for (std::size_t k = 0; k < n; ++k)
        out[k] *= fact[k];
    return out;
}

void criterion3() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t order = 1 + rng() % 10;
        std::vector<double> f(order + 1), g(order + 1);
        for (std::size_t k = 0; k <= order; ++k) {
            f[k] = u(rng) * std::tgamma(static_cast<double>(k) + 1);
            g[k] = k == 0 ? 0.0 : u(rng) * std::tgamma(static_cast<double>(k) + 1);
        }
        const auto h = compose_jets(FormalJet::from_values(f), FormalJet::from_values(g));
        const auto want = naive_compose(f, g);
        for (std::size_t k = 0; k <= order; ++k) {
            const long double diff = std::fabs(static_cast<long double>(h[k].linear()) - want[k]);
            worst = std::max(worst, static_cast<double>(diff / std::fabs(want[k])));
        }
    }
    auto gk = FormalJet::factorial_power(1, 15);
    gk.coeffs[0] = SignedLog{};
    const auto h = compose_jets(FormalJet::factorial_power(1, 15), gk);
    double worst_ulp = 0;
    for (std::size_t k = 1; k <= 15; ++k) {
        const double want = static_cast<double>(k - 1) * std::log(2.0) + log_factorial(k);
        worst_ulp = std::max(worst_ulp, ulp_distance(h[k].magnitude.log(), want, std::fabs(want)));
    }
    const double s = since(t0);
    report(3, worst <= 1e-10 && worst_ulp <= 8, s,
           fmt("max relative error %.3g on 500 random jets; closed form within %.0f ulp", worst, worst_ulp));
}

void criterion4() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const WeightSequence ms[] = {WeightSequence::constant(), WeightSequence::gevrey(1), WeightSequence::qpower(1.2)};
    std::size_t violations = 0, fixtures = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t order = 2 + rng() % 11;
        std::vector<double> f(order + 1), g(order + 1);
        for (std::size_t k = 0; k <= order; ++k) {
            f[k] = u(rng) * std::tgamma(static_cast<double>(k) + 1);
            g[k] = k == 0 ? 0.0 : u(rng) * std::tgamma(static_cast<double>(k) + 1);
        }
        const auto fj = FormalJet::from_values(f), gj = FormalJet::from_values(g);
        const auto& m = ms[trial % 3];
        const auto& l = ms[(trial / 3) % 3];
        const double rf = 0.25 + 0.25 * static_cast<double>(rng() % 12);
        const double rg = 0.25 + 0.25 * static_cast<double>(rng() % 12);
        const double cf = jet_norm_rho(fj, m, rf).linear(), cg = jet_norm_rho(gj, l, rg).linear();
        const auto r = verify_composition_bound(fj, gj, m, l, rf, cf, rg, cg);
        violations += r.violations;
        ++fixtures;
    }
    const double s = since(t0);
    report(4, violations == 0 && fixtures == 200, s,
           fmt("%.0f violations on %.0f certified fixtures", static_cast<double>(violations),
               static_cast<double>(fixtures)));
}

void criterion5() {
    const auto t0 = Clock::now();
    const auto f = FormalJet::factorial_power(2.0, 256);
    const auto res = majorant_construction(WeightSequence::constant(), f);
    double worst = 0;
    for (std::size_t j = 0; j < res.nodes.size(); ++j) {
        const std::size_t k = res.nodes[j].k;
        const double w =
            std::exp((f[k].magnitude.log() - log_factorial(k) - res.logs[k]) / static_cast<double>(k));
        worst = std::max(worst, std::fabs(w - static_cast<double>(j + 1)) / static_cast<double>(j + 1));
        worst = std::max(worst, std::fabs(std::exp(res.nodes[j].log_inv_b) - static_cast<double>(j + 1)) /
                                    static_cast<double>(j + 1));
    }
    const auto d = res.diagnostics();
    const bool convex = d["phi_convex"] == true, ratio = d["phi_over_k_nondecreasing"] == true;
    const bool wlc = is_weakly_log_convex(res.sequence(), res.logs.size() - 1).holds();
    const double s = since(t0);
    report(5, worst <= 1e-9 && convex && ratio && wlc && res.nodes.size() >= 2, s,
           fmt("%.0f nodes, witness error %.3g", static_cast<double>(res.nodes.size()), worst) +
               (convex ? ", phi convex" : ", phi NOT convex") + (ratio ? ", phi/k nondecreasing" : ", phi/k decreases") +
               (wlc ? ", L weakly log-convex" : ", L NOT weakly log-convex"));
}

void criterion6() {
    const auto t0 = Clock::now();
    bool ok = true;
    std::string detail;
    const auto one = WeightSequence::constant(), g1 = WeightSequence::gevrey(1), q2 = WeightSequence::qpower(2);

    const auto mg1 = moderate_growth_sup(one, 256);
    const auto qa1 = quasianalytic_verdict(one, 2, 512);
    ok = ok && is_log_convex(one, 256).holds() && mg1.verdict.holds() && mg1.sup == 1.0 && qa1.verdict.holds() &&
         qa1.tail_exponent >= 0.9 && qa1.tail_exponent <= 1.0;
    detail += fmt("const:1 sigma %.6g p %.4f; ", mg1.sup, qa1.tail_exponent);

    const auto mgg = moderate_growth_sup(g1, 256);
    const auto qag = quasianalytic_verdict(g1, 2, 512);
    ok = ok && is_log_convex(g1, 256).holds() && mgg.sup <= 2.0 && qag.verdict.fails() && qag.tail_exponent >= 1.8 &&
         qag.tail_exponent <= 2.2;
    detail += fmt("gevrey:s=1 sigma %.6g p %.4f; ", mgg.sup, qag.tail_exponent);

    const auto logs = q2.logs(256);
    bool grows = true;
    for (std::size_t k = 1; k <= 128; ++k)
        grows = grows && moderate_growth_log_quotient(logs, k, k) >= 0.5 * static_cast<double>(k) * std::log(2.0);
    const auto mgq = moderate_growth_sup(q2, 256);
    ok = ok && is_log_convex(q2, 256).holds() && grows && !mgq.verdict.holds();
    detail += fmt("qpow:q=2 log statistic at j=k=128 is %.4g (bound %.4g)", moderate_growth_log_quotient(logs, 128, 128),
                  64 * std::log(2.0));
    report(6, ok, since(t0), detail);
}

void criterion7() {
    const auto t0 = Clock::now();
    std::vector<std::string> corpus = {"exp(x)", "sin(x)"};
    // x exp(y) on slices y = c and x = c
    for (double c : {0.0, 0.5, 1.0}) {
        const auto e = parse_expr("x*exp(y)");
        corpus.push_back(e.substitute('y', Expr::constant(c)).render());
        corpus.push_back(e.substitute('x', Expr::constant(c)).substitute('y', Expr::x()).render());
    }
    std::mt19937_64 rng(707);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int p = 0; p < 4; ++p) {
        std::string text = std::to_string(u(rng));
        for (int d = 1; d <= 6; ++d)
            text += " + (" + std::to_string(u(rng)) + ")*x^" + std::to_string(d);
        corpus.push_back(text);
    }
    std::size_t violations = 0, entries = 0;
    double worst = 0;
    for (const auto& text : corpus) {
        const auto sj = sample_jet(parse_expr(text), Grid::line(Axis{0, 1, 64}), 10);
        const auto r = verify_taylor_remainder_bound(sj, WeightSequence::constant(), 1.0, 10);
        violations += r.violations;
        entries += r.entries.size();
        worst = std::max(worst, r.max_ratio);
        if (!r.verdict.holds())
            ++violations;
    }
    const double s = since(t0);
    report(7, violations == 0, s,
           fmt("%.0f functions, %.0f (n,k) entries, max lhs/rhs %.6f", static_cast<double>(corpus.size()),
               static_cast<double>(entries), worst));
}

void criterion8() {
    const auto t0 = Clock::now();
    const Axis unit{0, 1, 64};
    bool ok = true;
    std::string detail;
    for (const char* spec : {"const:1", "gevrey:s=1"}) {
        const auto m = parse_sequence_spec(spec);
        const double sigma = std::max(1.0, moderate_growth_sup(m, 256).sup);
        const auto r = explaw_verify(parse_expr("exp(x+y)"), unit, unit, m, sigma, 1.0, 1.0, 8);
        ok = ok && r.violations9 == 0 && r.violations6 == 0 && r.violations7 == 0 && r.slack6_min >= 0 &&
             r.slack7_min >= 0 && r.slack9_min >= 0 && r.verdict.holds();
        detail += std::string(spec) + fmt(": slack (6) %.4g, (7) %.4g, (9) %.4g; ", r.slack6_min, r.slack7_min,
                                          r.slack9_min);
    }
    report(8, ok, since(t0), detail);
}

void criterion9() {
    const auto t0 = Clock::now();
    const auto r = counterexample_54(2.0, 8, 1.0);
    bool ok = r.rows.size() == 8 && r.strictly_increasing && r.verdict.holds();
    for (const auto& row : r.rows) {
        const double n = static_cast<double>(row.n);
        ok = ok && row.valid && row.log_term >= n * std::log(n) - 1e-12;
    }
    ok = ok && r.rows.back().log_term >= std::log(16777216.0);
    bool stable = r.c_sums.size() == 3 && r.c_stable.size() == 3;
    for (std::size_t i = 0; stable && i < 3; ++i)
        stable = r.c_stable[i] && r.c_sums[i].first == std::pow(2.0, static_cast<double>(i));
    const double s = since(t0);
    report(9, ok && stable && s < 1.0, s,
           fmt("row 8 term %.6g >= 8^8; growth factor %.3g; C(rho) stable ", std::exp(r.rows.back().log_term),
               std::exp(r.log_growth)) +
               (stable ? "yes" : "no"));
}

void criterion10() {
    const auto t0 = Clock::now();
    const char* corpus[] = {"exp(x)",          "sin(x)",        "cos(2*x)",         "log(2+x)",
                            "1/(1+x^2)",       "x^6 - 3*x^2",   "exp(x)*sin(3*x)",  "x*exp(y)",
                            "exp(x+y)",        "sin(x)*exp(y)", "cos(3*x*y)",       "log(3+x+y)/(2+sin(y))"};
    const double dirs[][2] = {{1, 0}, {0, 1}, {0.6, 0.8}, {-0.8, 0.6}};
    double worst = 0;
    std::string where;
    for (const char* text : corpus) {
        const auto e = parse_expr(text);
        for (double x : {0.1, 0.5, 0.9})
            for (double y : {0.2, 0.7})
                for (const auto& d : dirs) {
                    if (!e.uses('y') && d[1] != 0)
                        continue;
                    const auto fd = finite_difference_check(e, x, y, d[0], d[1], 6, 1e-3);
                    if (fd.max_rel_error > worst) {
                        worst = fd.max_rel_error;
                        where = text;
                    }
                }
    }
    report(10, worst <= 1e-5, since(t0), fmt("max relative error %.3g", worst) + " (" + where + ")");
}

} // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
