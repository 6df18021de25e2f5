#include "dckit/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dckit/error.hpp"

namespace dckit {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<double> weighted_logs(const WeightSequence& m, std::size_t kmax) {
    auto logs = m.logs(kmax);
    for (std::size_t k = 0; k <= kmax; ++k)
        logs[k] += log_factorial(k);
    return logs;
}

} // namespace

IncreasingMinorant increasing_minorant(const WeightSequence& m, std::size_t kmax) {
    if (kmax < 1)
        throw InvalidParameter("increasing_minorant needs kmax >= 1");
    const auto w = weighted_logs(m, kmax);
    std::vector<double> raw(kmax + 1, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t k = 1; k <= kmax; ++k)
        raw[k] = w[k] / static_cast<double>(k);
    IncreasingMinorant out;
    out.logs = raw;
    for (std::size_t k = kmax; k-- > 1;)
        out.logs[k] = std::min(out.logs[k + 1], raw[k]);
    out.truncation_caveat = kmax >= 2 && raw[kmax] < raw[kmax - 1];
    return out;
}

LogConvexMinorant log_convex_minorant(const WeightSequence& m, std::size_t kmax) {
    if (kmax < 2)
        throw InvalidParameter("log_convex_minorant needs kmax >= 2");
    const auto w = weighted_logs(m, kmax);
    std::vector<std::size_t> hull;
    for (std::size_t k = 0; k <= kmax; ++k) {
        while (hull.size() >= 2) {
            const std::size_t o = hull[hull.size() - 2], a = hull.back();
            const double cross = static_cast<double>(a - o) * (w[k] - w[o]) - (w[a] - w[o]) * static_cast<double>(k - o);
            if (cross <= 0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(k);
    }
    LogConvexMinorant out;
    out.logs.assign(kmax + 1, 0.0);
    for (std::size_t i = 0; i + 1 < hull.size(); ++i) {
        const std::size_t a = hull[i], b = hull[i + 1];
        const double span = static_cast<double>(b - a);
        for (std::size_t k = a; k <= b; ++k) {
            if (k == a || k == b)
                out.logs[k] = w[k];
            else
                out.logs[k] = (static_cast<double>(b - k) * w[a] + static_cast<double>(k - a) * w[b]) / span;
        }
    }
    out.vertices = hull;
    out.sensitive_from = hull.size() >= 2 ? hull[hull.size() - 2] : 0;
    return out;
}

std::vector<double> compose_weights(const WeightSequence& m, const WeightSequence& l, std::size_t kmax) {
    if (kmax < 1)
        throw InvalidParameter("compose_weights needs kmax >= 1");
    const auto lm = m.logs(kmax);
    const auto ll = l.logs(kmax);
    std::vector<double> out(kmax + 1, kNegInf);
    out[0] = lm[0];
    // layer[k] = P(j, k): best log L_a1 + ... + L_aj over compositions of k into j parts
    std::vector<double> layer(kmax + 1, kNegInf), next(kmax + 1, kNegInf);
    for (std::size_t k = 1; k <= kmax; ++k)
        layer[k] = ll[k];
    for (std::size_t j = 1; j <= kmax; ++j) {
        for (std::size_t k = j; k <= kmax; ++k)
            out[k] = std::max(out[k], lm[j] + layer[k]);
        if (j == kmax)
            break;
        std::fill(next.begin(), next.end(), kNegInf);
        for (std::size_t k = j + 1; k <= kmax; ++k) {
            double best = kNegInf;
            for (std::size_t a = 1; a + j <= k; ++a)
                best = std::max(best, ll[a] + layer[k - a]);
            next[k] = best;
        }
        std::swap(layer, next);
    }
    return out;
}

double PiecewiseAffine::slope(std::size_t i) const {
    const auto& [k1, v1] = nodes.at(i);
    const auto& [k0, v0] = nodes.at(i - 1);
    return (v1 - v0) / static_cast<double>(k1 - k0);
}

double PiecewiseAffine::operator()(double k) const {
    if (nodes.empty())
        return 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double ki = static_cast<double>(nodes[i].first);
        if (k == ki)
            return nodes[i].second;
        if (k < ki) {
            if (i == 0)
                return nodes[0].second;
            const double k0 = static_cast<double>(nodes[i - 1].first);
            return (nodes[i - 1].second * (ki - k) + nodes[i].second * (k - k0)) / (ki - k0);
        }
    }
    if (nodes.size() < 2)
        return nodes.back().second;
    return nodes.back().second + slope(nodes.size() - 1) * (k - static_cast<double>(nodes.back().first));
}

Json MajorantResult::diagnostics() const {
    Json j;
    Json ns = Json::array();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& n = nodes[i];
        Json e;
        e["j"] = i;
        e["k"] = n.k;
        e["beta"] = json_number(std::exp(n.log_beta));
        e["log_beta"] = n.log_beta;
        e["g"] = json_number(std::exp(n.log_g));
        e["witness"] = json_number(std::exp(n.log_witness));
        e["inverse_b"] = json_number(std::exp(n.log_inv_b));
        e["witness_relative_error"] = std::fabs(std::expm1(n.log_witness - n.log_inv_b));
        ns.push_back(e);
    }
    j["nodes"] = ns;
    Json phi_nodes = Json::array();
    for (const auto& [k, v] : phi.nodes)
        phi_nodes.push_back(Json::array({k, v}));
    j["phi_nodes"] = phi_nodes;
    j["tail_slope"] = tail_slope;
    j["extrapolation"] = "phi(k) = phi(k_last) + tail_slope * (k - k_last) for k beyond the last node";

    bool convex = true;
    for (std::size_t i = 2; i < phi.nodes.size(); ++i)
        convex = convex && phi.slope(i) >= phi.slope(i - 1);
    bool ratio_nondecreasing = true;
    const std::size_t kmax = logs.empty() ? 0 : logs.size() - 1;
    for (std::size_t k = 1; k < kmax; ++k)
        ratio_nondecreasing =
            ratio_nondecreasing && phi(double(k + 1)) / double(k + 1) >= phi(double(k)) / double(k) - 1e-12;
    bool weakly = true;
    for (std::size_t k = 1; k < kmax; ++k) {
        const double a = logs[k - 1] + log_factorial(k - 1), b = logs[k] + log_factorial(k),
                     c = logs[k + 1] + log_factorial(k + 1);
        weakly = weakly && 2 * b <= a + c + 1e-9;
    }
    j["phi_convex"] = convex;
    j["phi_over_k_nondecreasing"] = ratio_nondecreasing;
    j["L_weakly_log_convex"] = weakly;
    return j;
}

MajorantResult majorant_construction(const WeightSequence& m, const FormalJet& f, const MajorantOptions& options) {
    const std::size_t kmax = f.order();
    if (kmax < 2)
        throw InsufficientData("jet truncation too short");
    const auto lm = m.logs(kmax);
    if (!options.skip_convexity_check) {
        for (std::size_t k = 1; k < kmax; ++k) {
            const double a = lm[k - 1] + log_factorial(k - 1), b = lm[k] + log_factorial(k),
                         c = lm[k + 1] + log_factorial(k + 1);
            if (2 * b > a + c + 1e-9)
                throw NotWeaklyLogConvex("k -> log(k! M_k) is not convex at k = " + std::to_string(k));
        }
    }
    std::vector<double> log_g(kmax + 1, kNegInf);
    for (std::size_t k = 1; k <= kmax; ++k)
        if (!f[k].is_zero())
            log_g[k] = (f[k].magnitude.log() - log_factorial(k) - lm[k]) / static_cast<double>(k);

    MajorantResult out;
    std::size_t j = 0;
    for (std::size_t k = 1; k <= kmax; ++k) {
        if (log_g[k] == kNegInf)
            continue;
        const double a = options.a(j), b = options.b(j);
        if (!(a > 0) || !(b > 0))
            throw InvalidParameter("schedules must be positive");
        if (log_g[k] < std::log(a))
            continue;
        const double log_beta = std::log(b) + log_g[k];
        if (!(log_beta > 0))
            continue;
        if (!out.nodes.empty()) {
            const auto& prev = out.nodes.back();
            if (!(log_beta > prev.log_beta) || log_beta < static_cast<double>(prev.k) * prev.log_beta)
                continue;
        }
        MajorantNode n;
        n.k = k;
        n.log_g = log_g[k];
        n.log_beta = log_beta;
        n.log_inv_b = -std::log(b);
        out.nodes.push_back(n);
        ++j;
    }
    if (out.nodes.size() < 2)
        throw InsufficientData("fewer than 2 nodes k_j fit inside the truncation (found " +
                               std::to_string(out.nodes.size()) + ")");

    out.phi.nodes.emplace_back(0, 0.0);
    for (const auto& n : out.nodes)
        out.phi.nodes.emplace_back(n.k, static_cast<double>(n.k) * n.log_beta);
    out.tail_slope = out.phi.slope(out.phi.nodes.size() - 1);
    out.logs.resize(kmax + 1);
    for (std::size_t k = 0; k <= kmax; ++k)
        out.logs[k] = out.phi(static_cast<double>(k)) + lm[k];
    for (auto& n : out.nodes)
        n.log_witness = (f[n.k].magnitude.log() - log_factorial(n.k) - out.logs[n.k]) / static_cast<double>(n.k);
    return out;
}

} // namespace dckit
