#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "dckit/formal_jet.hpp"
#include "dckit/report.hpp"
#include "dckit/weight_sequence.hpp"

namespace dckit {

/// m_k = inf{(j! M_j)^(1/j) : k <= j <= kmax} for 1 <= k <= kmax.
struct IncreasingMinorant {
    std::vector<double> logs; ///< logs[k] = log m_k; logs[0] is not defined and set to NaN
    bool truncation_caveat = false; ///< raw sequence still decreasing at kmax

    double log_at(std::size_t k) const { return logs.at(k); }
    std::size_t kmax() const noexcept { return logs.empty() ? 0 : logs.size() - 1; }
};

IncreasingMinorant increasing_minorant(const WeightSequence& m, std::size_t kmax);

/// Lower convex envelope of the points (k, log k! M_k), 0 <= k <= kmax.
struct LogConvexMinorant {
    std::vector<double> logs;           ///< log M^lc_k (a minorant of k! M_k)
    std::vector<std::size_t> vertices;  ///< hull vertex indices, increasing, first 0 and last kmax
    std::size_t sensitive_from = 0;     ///< indices > sensitive_from lie on the last hull segment

    std::size_t kmax() const noexcept { return logs.empty() ? 0 : logs.size() - 1; }
};

LogConvexMinorant log_convex_minorant(const WeightSequence& m, std::size_t kmax);

/// log (M o L)_k for 0 <= k <= kmax, the max of M_j L_a1 ... L_aj over compositions of k.
std::vector<double> compose_weights(const WeightSequence& m, const WeightSequence& l, std::size_t kmax);

/// Piecewise affine function through the given nodes, affine extrapolation after the last.
struct PiecewiseAffine {
    std::vector<std::pair<std::size_t, double>> nodes;

    double operator()(double k) const;
    /// Slope on the segment ending at nodes[i] (i >= 1).
    double slope(std::size_t i) const;
};

struct MajorantOptions {
    std::function<double(std::size_t)> a = [](std::size_t j) { return double(j + 1) * double(j + 1); };
    std::function<double(std::size_t)> b = [](std::size_t j) { return 1.0 / double(j + 1); };
    bool skip_convexity_check = false;
};

struct MajorantNode {
    std::size_t k = 0;
    double log_g = 0;       ///< log (|f_k| / (k! M_k))^(1/k)
    double log_beta = 0;    ///< log beta_j
    double log_witness = 0; ///< log (|f_k| / (k! L_k))^(1/k), recomputed from L
    double log_inv_b = 0;   ///< -log b_j
};

struct MajorantResult {
    std::vector<double> logs; ///< log L_k for 0 <= k <= K
    PiecewiseAffine phi;
    std::vector<MajorantNode> nodes;
    double tail_slope = 0; ///< phi(k) = phi(k_last) + tail_slope (k - k_last) beyond the last node

    WeightSequence sequence() const { return WeightSequence::explicit_logs(logs); }
    Json diagnostics() const;
};

/// Build L = e^phi M with M <| L and f outside the Roumieu class of L, from the truncation of f.
MajorantResult majorant_construction(const WeightSequence& m, const FormalJet& f, const MajorantOptions& options = {});

} // namespace dckit
