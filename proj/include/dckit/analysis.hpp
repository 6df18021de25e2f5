#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "dckit/report.hpp"
#include "dckit/weight_sequence.hpp"

namespace dckit {

/// Asymptotic tests on a statistic s_k given by log values over first <= k <= last.
/// Entries equal to -inf stand for s_k = 0.
namespace tail {

/// Bounded: Holds if the running max grows by less than stab_tol over the last quarter. With
/// `allow_fail`, Fails when s is nondecreasing over the last half and s_last >= growth_factor *
/// s_{last/2} (monotone divergence). Otherwise Inconclusive. Statistic = running max; witness =
/// first argmax.
Verdict bounded(const std::vector<double>& log_s, std::size_t first, std::size_t last, const AnalysisConfig& cfg,
                bool allow_fail = false);

/// Tends to 0: Holds if s is nonincreasing over the last half and s_last <= decay_factor *
/// s_{last/2}; Fails if the minimum over the last half is at least s_{last/2} (witness =
/// argmin); otherwise Inconclusive. Statistic = s_last.
Verdict vanishes(const std::vector<double>& log_s, std::size_t first, std::size_t last, const AnalysisConfig& cfg);

/// Tends to infinity: Holds if s is nondecreasing over the last half and s_last >= growth_factor *
/// s_{last/2}; Fails if s_last <= (1 + stab_tol) * (running max up to last/2) and the max over the
/// last half obeys the same bound (witness = last); otherwise Inconclusive. Statistic = s_last.
Verdict diverges(const std::vector<double>& log_s, std::size_t first, std::size_t last, const AnalysisConfig& cfg);

} // namespace tail

Verdict is_log_convex(const WeightSequence& m, std::size_t kmax, const AnalysisConfig& cfg = {});
Verdict is_weakly_log_convex(const WeightSequence& m, std::size_t kmax, const AnalysisConfig& cfg = {});

struct SupEstimate {
    double sup = 0;
    Verdict verdict;
};

/// max over 1 <= k <= kmax of (M_{k+1}/M_k)^(1/k) (needs M up to kmax + 1).
SupEstimate derivation_closure_sup(const WeightSequence& m, std::size_t kmax, const AnalysisConfig& cfg = {});

/// log (M_{j+k} / (M_j M_k))^(1/(j+k)).
double moderate_growth_log_quotient(const std::vector<double>& logs, std::size_t j, std::size_t k);

/// max over j, k >= 1, j + k <= kmax of (M_{j+k}/(M_j M_k))^(1/(j+k)); witness = argmax (j, k),
/// ties to the lexicographically smallest pair.
SupEstimate moderate_growth_sup(const WeightSequence& m, std::size_t kmax, const AnalysisConfig& cfg = {});

/// max over 1 <= k <= kmax of (M_k/N_k)^(1/k).
double ratio_root_sup(const WeightSequence& m, const WeightSequence& n, std::size_t kmax);

/// M <| N, i.e. (M_k/N_k)^(1/k) -> 0.
Verdict triangle_lhd(const WeightSequence& m, const WeightSequence& n, std::size_t kmax, const AnalysisConfig& cfg = {});

struct InclusionReport {
    Verdict beurling;               ///< C^(M) in C^(N)
    Verdict roumieu;                ///< C^{M} in C^{N}
    Verdict roumieu_into_beurling;  ///< C^{M} in C^(N)

    Json to_json() const;
};

InclusionReport inclusion_relation(const WeightSequence& m, const WeightSequence& n, std::size_t kmax,
                                   const AnalysisConfig& cfg = {});

struct QuasianalyticityReport {
    int criterion = 2;
    std::vector<std::pair<std::size_t, double>> partial_sums; ///< (K, S_K)
    double tail_exponent = 0;
    Verdict verdict;

    Json to_json() const;
};

/// Divergence test for the Denjoy-Carleman sums. criterion 2: sum 1/m_k with m the increasing
/// minorant of (k! M_k)^(1/k); 3: sum (1/M^lc_k)^(1/k); 4: sum M^lc_k / M^lc_{k+1}, with M^lc
/// the log-convex minorant of k! M_k. Holds means quasianalytic.
QuasianalyticityReport quasianalytic_verdict(const WeightSequence& m, int criterion, std::size_t kmax,
                                             const AnalysisConfig& cfg = {});

struct LimitReport {
    Verdict ratio; ///< M_{k+1}/M_k -> infinity
    Verdict root;  ///< M_k^(1/k) -> infinity
};

LimitReport limit_conditions(const WeightSequence& m, std::size_t kmax, const AnalysisConfig& cfg = {});

/// Everything the classify command reports.
Json classify(const WeightSequence& m, std::size_t kmax, const AnalysisConfig& cfg = {});

} // namespace dckit
