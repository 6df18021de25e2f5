#pragma once

#include <cstddef>
#include <vector>

#include "dckit/formal_jet.hpp"
#include "dckit/report.hpp"
#include "dckit/weight_sequence.hpp"

namespace dckit {

/// Largest order accepted by compose_jets (the sum has 2^(k-1) compositions at order k).
inline constexpr std::size_t kMaxCompositionOrder = 20;

/// sup_k |f_k| / (rho^k k! M_k) over the truncation, in log-domain; zero for the zero jet.
LogMagnitude jet_norm_rho(const FormalJet& f, const WeightSequence& m, LogMagnitude rho);
inline LogMagnitude jet_norm_rho(const FormalJet& f, const WeightSequence& m, double rho) {
    return jet_norm_rho(f, m, LogMagnitude::from_linear(rho));
}

struct MembershipReport {
    std::vector<double> log_g; ///< log (|f_k| / (k! M_k))^(1/k); index 0 unused (NaN)
    double rho_star = 0;       ///< max of g_k over the last half
    Verdict roumieu;
    Verdict beurling;

    Json to_json() const;
};

/// Roumieu / Beurling membership of the jet in the sequence classes of M (K >= 8).
MembershipReport classify_membership(const FormalJet& f, const WeightSequence& m, const AnalysisConfig& cfg = {});

/// Faa di Bruno composition f o g in derivative convention; requires g_0 = 0. The result has
/// order min(K_f, K_g) and is exact at every order it carries. Orders at which the positive and
/// negative parts cancel to within 1e-12 relative are appended to `cancellation` if given.
FormalJet compose_jets(const FormalJet& f, const FormalJet& g, std::vector<std::size_t>* cancellation = nullptr);

struct CompositionBoundReport {
    std::vector<double> lhs_log;   ///< log |(f o g)_k| / (k! (M o L)_k), k >= 1 (index 0 unused)
    std::vector<double> bound_log; ///< log of the bound at k
    std::size_t violations = 0;
    double max_slack_log = 0;      ///< max over k of lhs_log - bound_log
    std::size_t worst_k = 0;
    std::vector<std::size_t> cancellation;
    Verdict verdict;

    Json to_json() const;
};

/// Checks |(f o g)_k| / (k! (M o L)_k) <= (rho_g (1 + rho_f C_g))^k rho_f C_f C_g / (1 + rho_f C_g)
/// for 1 <= k <= K after certifying the constants on the truncations.
CompositionBoundReport verify_composition_bound(const FormalJet& f, const FormalJet& g, const WeightSequence& m,
                                                const WeightSequence& l, double rho_f, double c_f, double rho_g,
                                                double c_g);

enum class DecayClass { None, SomeRho, AllRho };

const char* to_string(DecayClass d) noexcept;

/// Positive sequence r_0..r_kmax with its verified structure.
struct TestSequence {
    std::vector<double> logs;
    bool submultiplicative = false;
    DecayClass decay = DecayClass::None;

    static TestSequence from_logs(std::vector<double> logs, const AnalysisConfig& cfg = {});
    static TestSequence from_sequence(const WeightSequence& r, std::size_t kmax, const AnalysisConfig& cfg = {});
    std::size_t kmax() const noexcept { return logs.empty() ? 0 : logs.size() - 1; }
};

/// Which equivalence the test sequence is used for: infinite radius (r_k rho^k -> 0 for some rho)
/// or positive radius (r_k rho^k -> 0 for all rho).
enum class RadiusDirection { Infinite, Positive };

struct RadiusReport {
    Verdict bounded;               ///< boundedness of |a_k| r_k delta^k
    double radius_estimate = 0;    ///< 1 / max over the last half of |a_k|^(1/k)
    Json to_json() const;
};

RadiusReport radius_test(const FormalJet& a, const TestSequence& r, double delta,
                         RadiusDirection direction = RadiusDirection::Infinite, const AnalysisConfig& cfg = {});

} // namespace dckit
