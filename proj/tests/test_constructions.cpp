#include "doctest.h"

#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "dckit/analysis.hpp"
#include "dckit/constructions.hpp"
#include "dckit/error.hpp"
#include "dckit/formal_jet.hpp"

using namespace dckit;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<double> weighted(const std::vector<double>& logs) {
    std::vector<double> w(logs.size());
    for (std::size_t k = 0; k < logs.size(); ++k)
        w[k] = logs[k] + log_factorial(k);
    return w;
}

// inf over j <= k <= l, j < l of the chord through (j, w_j), (l, w_l) at k.
std::vector<double> naive_envelope(const std::vector<double>& w) {
    const std::size_t n = w.size();
    std::vector<double> out(n, std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j <= k; ++j)
            for (std::size_t l = std::max(k, j + 1); l < n; ++l) {
                const double t = static_cast<double>(k - j) / static_cast<double>(l - j);
                out[k] = std::min(out[k], (1 - t) * w[j] + t * w[l]);
            }
    return out;
}

// max over compositions a_1 + ... + a_j = k of log M_j + sum log L_ai, enumerated recursively.
double naive_composed(const std::vector<double>& lm, const std::vector<double>& ll, std::size_t k) {
    double best = kNegInf;
    std::function<void(std::size_t, std::size_t, double)> rec = [&](std::size_t left, std::size_t parts, double acc) {
        if (left == 0) {
            best = std::max(best, lm[parts] + acc);
            return;
        }
        for (std::size_t a = 1; a <= left; ++a)
            rec(left - a, parts + 1, acc + ll[a]);
    };
    rec(k, 0, 0.0);
    return best;
}

std::vector<double> random_logs(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<double> v(n);
    for (auto& x : v)
        x = u(rng);
    return v;
}

} // namespace

TEST_CASE("increasing minorant") {
    const auto r = increasing_minorant(WeightSequence::constant(), 32);
    CHECK(std::isnan(r.logs[0]));
    CHECK(r.logs[1] == doctest::Approx(0.0));
    for (std::size_t k = 2; k <= 32; ++k) {
        CHECK(r.logs[k] >= r.logs[k - 1]);
        CHECK(r.logs[k] <= log_factorial(k) / static_cast<double>(k) + 1e-15);
    }
    CHECK_FALSE(r.truncation_caveat);

    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const auto logs = random_logs(rng, 20);
        const auto w = weighted(logs);
        const auto m = increasing_minorant(WeightSequence::explicit_logs(logs), 19);
        for (std::size_t k = 1; k <= 19; ++k) {
            double inf = std::numeric_limits<double>::infinity();
            for (std::size_t j = k; j <= 19; ++j)
                inf = std::min(inf, w[j] / static_cast<double>(j));
            CHECK(m.logs[k] == inf);
        }
    }
}

TEST_CASE("log-convex minorant examples") {
    // k! M_k = [1, 4, 2, 16]
    const auto m = WeightSequence::explicit_values({1, 4, 1, 16.0 / 6.0});
    const auto lc = log_convex_minorant(m, 3);
    CHECK(std::exp(lc.logs[0]) == doctest::Approx(1.0));
    CHECK(std::exp(lc.logs[1]) == doctest::Approx(std::sqrt(2.0)));
    CHECK(std::exp(lc.logs[2]) == doctest::Approx(2.0));
    CHECK(std::exp(lc.logs[3]) == doctest::Approx(16.0));
    CHECK(lc.vertices == std::vector<std::size_t>{0, 2, 3});
    CHECK(lc.sensitive_from == 2);

    const auto q = log_convex_minorant(WeightSequence::qpower(2), 40);
    for (std::size_t k = 0; k <= 40; ++k)
        CHECK(q.logs[k] == doctest::Approx(static_cast<double>(k * k) * std::log(2.0) + log_factorial(k)));
    CHECK_THROWS_AS(log_convex_minorant(WeightSequence::constant(), 1), InvalidParameter);
}

TEST_CASE("log-convex minorant equals the exhaustive inf formula") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t kmax = 2 + static_cast<std::size_t>(rng() % 23);
        const auto logs = random_logs(rng, kmax + 1);
        const auto w = weighted(logs);
        const auto lc = log_convex_minorant(WeightSequence::explicit_logs(logs), kmax);
        const auto oracle = naive_envelope(w);
        for (std::size_t k = 0; k <= kmax; ++k) {
            CHECK(std::fabs(lc.logs[k] - oracle[k]) <= 1e-9 * std::max(1.0, std::fabs(oracle[k])));
            CHECK(lc.logs[k] <= w[k] + 1e-12);
        }
        for (std::size_t k = 1; k < kmax; ++k)
            CHECK(lc.logs[k - 1] + lc.logs[k + 1] - 2 * lc.logs[k] >= -1e-9);
        for (auto v : lc.vertices)
            CHECK(lc.logs[v] == w[v]);
    }
}

TEST_CASE("compose_weights examples") {
    const auto one = WeightSequence::constant();
    for (double l : compose_weights(one, one, 20))
        CHECK(l == 0.0);
    const auto two = scale(one, 1.0, 2.0);
    const auto a = compose_weights(two, one, 6);
    const auto b = compose_weights(one, two, 6);
    for (std::size_t k = 0; k <= 6; ++k) {
        CHECK(a[k] == doctest::Approx(static_cast<double>(k) * std::log(2.0)));
        CHECK(b[k] == doctest::Approx(k == 0 ? 0.0 : static_cast<double>(k) * std::log(2.0)));
    }
    CHECK_THROWS_AS(compose_weights(one, WeightSequence::explicit_values({1, 1, 1}), 5), IndexOutOfRange);
    CHECK_THROWS_AS(compose_weights(one, one, 0), InvalidParameter);
}

TEST_CASE("compose_weights matches composition enumeration") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        const auto lm = random_logs(rng, 13), ll = random_logs(rng, 13);
        const auto out = compose_weights(WeightSequence::explicit_logs(lm), WeightSequence::explicit_logs(ll), 12);
        CHECK(out[0] == lm[0]);
        for (std::size_t k = 1; k <= 12; ++k) {
            const double want = naive_composed(lm, ll, k);
            CHECK(ulp_distance(out[k], want, std::max(1.0, std::fabs(want))) <= 8.0);
        }
    }
}

TEST_CASE("log-convex normalized weights dominate compositions") {
    // M_1^j M_k >= M_j M_a1 ... M_aj for every composition of k into j parts
    for (const char* spec : {"gevrey:s=1", "gevrey:s=2", "qpow:q=1.5"}) {
        const auto m = normalize(parse_sequence_spec(spec));
        const auto lm = m.logs(10);
        for (std::size_t k = 1; k <= 10; ++k) {
            std::function<void(std::size_t, std::size_t, double)> rec = [&](std::size_t left, std::size_t parts,
                                                                             double acc) {
                if (left == 0) {
                    CHECK(static_cast<double>(parts) * lm[1] + lm[k] >= lm[parts] + acc - 1e-9);
                    return;
                }
                for (std::size_t a = 1; a <= left; ++a)
                    rec(left - a, parts + 1, acc + lm[a]);
            };
            rec(k, 0, 0.0);
        }
    }
}

TEST_CASE("piecewise affine evaluation") {
    PiecewiseAffine p;
    p.nodes = {{0, 0.0}, {2, 2.0}, {4, 6.0}};
    CHECK(p(0) == 0.0);
    CHECK(p(1) == 1.0);
    CHECK(p(3) == 4.0);
    CHECK(p(4) == 6.0);
    CHECK(p(6) == 10.0);
    CHECK(p.slope(2) == 2.0);
}

TEST_CASE("majorant construction on f_k = (k!)^2") {
    const auto one = WeightSequence::constant();
    const auto f = FormalJet::factorial_power(2.0, 200);
    const auto res = majorant_construction(one, f);
    REQUIRE(res.nodes.size() >= 2);
    for (std::size_t j = 0; j < res.nodes.size(); ++j) {
        const auto k = res.nodes[j].k;
        // independent recomputation of the witness from the returned L
        const double w = std::exp((f[k].magnitude.log() - log_factorial(k) - res.logs[k]) / static_cast<double>(k));
        CHECK(w == doctest::Approx(static_cast<double>(j + 1)).epsilon(1e-9));
        if (j > 0) {
            CHECK(res.nodes[j].log_beta > res.nodes[j - 1].log_beta);
            CHECK(res.nodes[j].log_beta >= static_cast<double>(res.nodes[j - 1].k) * res.nodes[j - 1].log_beta);
            CHECK(k > res.nodes[j - 1].k);
        }
        CHECK(res.nodes[j].log_beta > 0);
        CHECK(std::exp(res.phi(static_cast<double>(k)) / static_cast<double>(k)) ==
              doctest::Approx(std::exp(res.nodes[j].log_beta)));
    }
    const auto d = res.diagnostics();
    CHECK(d["phi_convex"] == true);
    CHECK(d["phi_over_k_nondecreasing"] == true);
    CHECK(d["L_weakly_log_convex"] == true);
    // L_0 = 1 <= L_1
    CHECK(res.logs[0] == 0.0);
    CHECK(res.logs[1] >= 0.0);
    CHECK(is_weakly_log_convex(res.sequence(), 200).holds());
}

TEST_CASE("majorant construction errors") {
    const auto one = WeightSequence::constant();
    CHECK_THROWS_AS(majorant_construction(one, FormalJet::factorial_power(1.0, 100)), InsufficientData);
    CHECK_THROWS_AS(majorant_construction(one, FormalJet::factorial_power(2.0, 1)), InsufficientData);
    const auto bumpy = WeightSequence::explicit_values(
        [] {
            std::vector<double> v(101, 1.0);
            v[50] = 1e6;
            return v;
        }());
    CHECK_THROWS_AS(majorant_construction(bumpy, FormalJet::factorial_power(2.0, 100)), NotWeaklyLogConvex);
    MajorantOptions opt;
    opt.skip_convexity_check = true;
    const auto res = majorant_construction(bumpy, FormalJet::factorial_power(2.0, 100), opt);
    CHECK(res.diagnostics()["phi_convex"] == true);
    for (std::size_t j = 0; j < res.nodes.size(); ++j)
        CHECK(std::exp(res.nodes[j].log_witness) == doctest::Approx(static_cast<double>(j + 1)).epsilon(1e-9));
}
