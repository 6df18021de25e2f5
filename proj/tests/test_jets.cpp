#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>

#include "dckit/constructions.hpp"
#include "dckit/error.hpp"
#include "dckit/jets.hpp"

using namespace dckit;

namespace {

// Truncated series composition by repeated polynomial multiplication, in derivative convention.
std::vector<double> naive_compose(const std::vector<double>& f, const std::vector<double>& g) {
    const std::size_t n = std::min(f.size(), g.size());
    std::vector<double> a(n), b(n);
    for (std::size_t k = 0; k < n; ++k) {
        a[k] = f[k] / std::tgamma(static_cast<double>(k) + 1);
        b[k] = g[k] / std::tgamma(static_cast<double>(k) + 1);
    }
    std::vector<double> out(n, 0.0), power(n, 0.0);
    power[0] = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k)
            out[k] += a[j] * power[k];
        std::vector<double> next(n, 0.0);
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = 0; p + q < n; ++q)
                next[p + q] += power[p] * b[q];
        power = next;
    }
    for (std::size_t k = 0; k < n; ++k)
        out[k] *= std::tgamma(static_cast<double>(k) + 1);
    return out;
}

std::vector<double> random_jet(std::mt19937_64& rng, std::size_t order, bool zero_constant) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(order + 1);
    for (std::size_t k = 0; k <= order; ++k)
        v[k] = u(rng) * std::tgamma(static_cast<double>(k) + 1);
    if (zero_constant)
        v[0] = 0.0;
    return v;
}

std::vector<double> abs_values(std::vector<double> v) {
    for (auto& x : v)
        x = std::fabs(x);
    return v;
}

FormalJet from_logs(const std::vector<double>& logs) {
    std::vector<SignedLog> c;
    for (double l : logs)
        c.push_back(SignedLog::from_log(1, l));
    return FormalJet(c);
}

} // namespace

TEST_CASE("jet_norm_rho") {
    const auto g1 = WeightSequence::gevrey(1);
    CHECK(jet_norm_rho(FormalJet::weighted(g1, 30), g1, 1.0).log() == doctest::Approx(0.0));
    CHECK(jet_norm_rho(FormalJet::zero(10), g1, 1.0).is_zero());
    const auto c = jet_norm_rho(FormalJet::factorial_power(1, 20), WeightSequence::constant(), 0.5);
    CHECK(c.log() == doctest::Approx(20 * std::log(2.0)));

    std::mt19937_64 rng(1);
    for (int t = 0; t < 20; ++t) {
        const auto f = FormalJet::from_values(random_jet(rng, 15, false));
        double prev = jet_norm_rho(f, g1, 0.1).log();
        for (double rho : {0.2, 0.5, 1.0, 2.0, 7.0}) {
            const double cur = jet_norm_rho(f, g1, rho).log();
            CHECK(cur <= prev + 1e-12);
            prev = cur;
        }
    }
}

TEST_CASE("classify_membership") {
    const auto g1 = WeightSequence::gevrey(1);
    const auto member = classify_membership(FormalJet::weighted(g1, 64), g1);
    CHECK(member.roumieu.holds());
    CHECK(member.beurling.fails());
    CHECK(member.rho_star == doctest::Approx(1.0));

    const auto half = classify_membership(FormalJet::weighted(scale(g1, 1.0, 0.5), 64), g1);
    CHECK(half.roumieu.holds());
    CHECK(half.rho_star == doctest::Approx(0.5));

    const auto sq = classify_membership(FormalJet::factorial_power(2, 128), WeightSequence::constant());
    CHECK_FALSE(sq.roumieu.holds());
    CHECK(sq.log_g[128] > sq.log_g[64]);

    const auto beur = classify_membership(FormalJet::weighted(g1, 128), WeightSequence::gevrey(2));
    CHECK(beur.beurling.holds());
    CHECK(beur.roumieu.holds());

    CHECK_THROWS_AS(classify_membership(FormalJet::weighted(g1, 7), g1), InvalidParameter);
}

TEST_CASE("classify_membership under scaling c rho^k f_k") {
    const auto g1 = WeightSequence::gevrey(1);
    const std::size_t order = 128;
    const auto f = FormalJet::weighted(g1, order);
    const auto base = classify_membership(f, g1);
    for (double c : {0.5, 2.0})
        for (double rho : {0.5, 2.0}) {
            const auto scaled = classify_membership(FormalJet::weighted(scale(g1, c, rho), order), g1);
            CHECK(scaled.roumieu.status == base.roumieu.status);
            CHECK(scaled.beurling.status == base.beurling.status);
            // c contributes c^(1/k) to g_k; over the last half that is at most c^(2/K)
            const double slack = std::pow(2.0, 2.0 / static_cast<double>(order));
            CHECK(scaled.rho_star / (rho * base.rho_star) <= slack);
            CHECK(scaled.rho_star / (rho * base.rho_star) >= 1.0 / slack);
        }
}

TEST_CASE("compose_jets examples") {
    std::mt19937_64 rng(2);
    const auto g = FormalJet::from_values(random_jet(rng, 10, true));
    const auto id = compose_jets(FormalJet::identity(10), g);
    for (std::size_t k = 0; k <= 10; ++k)
        CHECK(id[k].linear() == doctest::Approx(g[k].linear()).epsilon(1e-14));

    auto gk = FormalJet::factorial_power(1, 12);
    gk.coeffs[0] = SignedLog{};
    const auto h = compose_jets(FormalJet::factorial_power(1, 12), gk);
    CHECK(h[0].linear() == 1.0);
    CHECK(h[2].linear() == doctest::Approx(4.0));
    for (std::size_t k = 1; k <= 12; ++k)
        CHECK(h[k].magnitude.log() ==
              doctest::Approx(static_cast<double>(k - 1) * std::log(2.0) + log_factorial(k)).epsilon(1e-13));

    const auto f = FormalJet::from_values(random_jet(rng, 6, false));
    const auto g2 = FormalJet::from_values(random_jet(rng, 9, true));
    const auto fg = compose_jets(f, g2);
    CHECK(fg.order() == 6);
    CHECK(fg[1].linear() == doctest::Approx(f[1].linear() * g2[1].linear()));

    CHECK_THROWS_AS(compose_jets(f, f), NonzeroConstantTerm);
    CHECK_THROWS_AS(compose_jets(FormalJet::identity(21), FormalJet::identity(21)), OrderTooLarge);
}

TEST_CASE("compose_jets agrees with naive polynomial composition") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t order = 1 + rng() % 10;
        const auto fv = random_jet(rng, order, false), gv = random_jet(rng, order, true);
        std::vector<std::size_t> canc;
        const auto h = compose_jets(FormalJet::from_values(fv), FormalJet::from_values(gv), &canc);
        const auto want = naive_compose(fv, gv);
        // size of the sum without cancellation, for orders where the signed sum nearly vanishes
        const auto mag = naive_compose(abs_values(fv), abs_values(gv));
        for (std::size_t k = 0; k <= order; ++k) {
            const double scale = std::max(std::fabs(want[k]), 1e-4 * mag[k]);
            CHECK(std::fabs(h[k].linear() - want[k]) <= 1e-10 * scale + 1e-300);
        }
    }
}

TEST_CASE("compose_jets is associative") {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t order = 2 + rng() % 9;
        const auto f = FormalJet::from_values(random_jet(rng, order, false));
        const auto g = FormalJet::from_values(random_jet(rng, order, true));
        const auto h = FormalJet::from_values(random_jet(rng, order, true));
        const auto left = compose_jets(compose_jets(f, g), h);
        const auto right = compose_jets(f, compose_jets(g, h));
        const auto mag = naive_compose(abs_values(naive_compose(abs_values(f.values()), abs_values(g.values()))),
                                       abs_values(h.values()));
        for (std::size_t k = 0; k <= order; ++k) {
            const double scale = std::max(std::fabs(right[k].linear()), 1e-4 * mag[k]);
            CHECK(std::fabs(left[k].linear() - right[k].linear()) <= 1e-9 * scale + 1e-300);
        }
    }
}

TEST_CASE("verify_composition_bound") {
    const auto one = WeightSequence::constant();
    const auto id = FormalJet::identity(12);
    const auto trivial = verify_composition_bound(id, id, one, one, 1, 1, 1, 1);
    CHECK(trivial.verdict.holds());
    CHECK(trivial.violations == 0);
    // equality at k = 1, nothing above
    CHECK(trivial.max_slack_log == doctest::Approx(0.0));
    for (std::size_t k = 2; k <= 12; ++k)
        CHECK(trivial.lhs_log[k] == -std::numeric_limits<double>::infinity());

    auto g = FormalJet::factorial_power(1, 12);
    g.coeffs[0] = SignedLog{};
    const auto tight = verify_composition_bound(FormalJet::factorial_power(1, 12), g, one, one, 1, 1, 1, 1);
    CHECK(tight.verdict.holds());
    for (std::size_t k = 1; k <= 12; ++k)
        CHECK(tight.lhs_log[k] == doctest::Approx(tight.bound_log[k]).epsilon(1e-12));
    CHECK(tight.max_slack_log == doctest::Approx(0.0).epsilon(1e-12));

    CHECK_THROWS_AS(verify_composition_bound(FormalJet::factorial_power(1, 12), g, one, one, 1, 0.5, 1, 1),
                    CertificateInvalid);

    std::mt19937_64 rng(8);
    const auto g1 = WeightSequence::gevrey(1);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t order = 2 + rng() % 11;
        const auto f = FormalJet::from_values(random_jet(rng, order, false));
        const auto gg = FormalJet::from_values(random_jet(rng, order, true));
        const double rf = 0.5 + static_cast<double>(rng() % 4), rg = 0.5 + static_cast<double>(rng() % 3);
        const auto& m = trial % 2 ? one : g1;
        const double cf = jet_norm_rho(f, m, rf).linear(), cg = jet_norm_rho(gg, one, rg).linear();
        const auto r = verify_composition_bound(f, gg, m, one, rf, cf, rg, cg);
        CHECK(r.verdict.holds());
        CHECK(r.violations == 0);
    }
}

TEST_CASE("test sequences and radius tests") {
    std::vector<double> inv3(65), inv_fact(65), grow(65);
    for (std::size_t k = 0; k <= 64; ++k) {
        inv3[k] = -static_cast<double>(k) * std::log(3.0);
        inv_fact[k] = -log_factorial(k);
        grow[k] = static_cast<double>(k) * static_cast<double>(k) * 0.01;
    }
    const auto r3 = TestSequence::from_logs(inv3);
    CHECK(r3.submultiplicative);
    CHECK(r3.decay == DecayClass::SomeRho);
    const auto rf = TestSequence::from_logs(inv_fact);
    CHECK(rf.submultiplicative);
    CHECK(rf.decay == DecayClass::AllRho);
    CHECK_FALSE(TestSequence::from_logs(grow).submultiplicative);

    const auto entire = radius_test(from_logs(inv_fact), r3, 2.0);
    CHECK(entire.bounded.holds());
    CHECK(entire.radius_estimate > 10.0);

    std::vector<double> pow3(65);
    for (std::size_t k = 0; k <= 64; ++k)
        pow3[k] = static_cast<double>(k) * std::log(3.0);
    const auto finite = radius_test(from_logs(pow3), r3, 2.0);
    CHECK(finite.bounded.fails());
    CHECK(finite.radius_estimate == doctest::Approx(1.0 / 3.0));

    CHECK(radius_test(FormalJet::zero(64), r3, 5.0).bounded.holds());
    CHECK(radius_test(from_logs(pow3), rf, 1.0, RadiusDirection::Positive).bounded.holds());
    CHECK_THROWS_AS(radius_test(from_logs(pow3), r3, 1.0, RadiusDirection::Positive), FlagMismatch);
    CHECK_THROWS_AS(radius_test(from_logs(pow3), TestSequence::from_logs(grow), 1.0), FlagMismatch);
    CHECK_THROWS_AS(radius_test(from_logs(pow3), r3, 0.0), InvalidParameter);
}

TEST_CASE("jet csv round trip and specs") {
    std::mt19937_64 rng(10);
    const auto f = FormalJet::from_values(random_jet(rng, 12, false));
    const auto back = parse_jet_csv(format_jet_csv(f));
    REQUIRE(back.order() == 12);
    for (std::size_t k = 0; k <= 12; ++k) {
        CHECK(back[k].sign == f[k].sign);
        CHECK(back[k].magnitude.log() == doctest::Approx(f[k].magnitude.log()).epsilon(1e-14));
    }
    const auto v = parse_jet_csv("# comment\n0,1.5\n\n1,-1,2\n2,0\n");
    CHECK(v[0].linear() == 1.5);
    CHECK(v[1].linear() == doctest::Approx(-100.0));
    CHECK(v[2].is_zero());
    CHECK_THROWS_AS(parse_jet_csv("0,1\n2,1\n"), ParseError);
    CHECK(parse_jet_spec("geom:r=2", 5)[5].linear() == doctest::Approx(32.0));
    CHECK(parse_jet_spec("values:[1,2,3]", 0).order() == 2);
    CHECK_THROWS_AS(parse_jet_spec("nope:1", 5), ParseError);
}
