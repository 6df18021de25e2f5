#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dckit/expr.hpp"
#include "dckit/report.hpp"
#include "dckit/weight_sequence.hpp"

namespace dckit {

inline constexpr std::size_t kMaxAxisPoints = 128;
/// Point pairs are scanned exhaustively; in two dimensions the remainder scan is limited to this
/// many grid points in total.
inline constexpr std::size_t kMaxWhitneyPoints2D = 256;

/// Uniform points a, ..., b (n of them; n = 1 gives the single point a).
struct Axis {
    double a = 0.0;
    double b = 1.0;
    std::size_t n = 64;

    std::vector<double> points() const;
};

/// "a,b,n".
Axis parse_axis(const std::string& text);

struct Grid {
    std::vector<Axis> axes;

    static Grid line(const Axis& a) { return Grid{{a}}; }
    static Grid box(const Axis& a, const Axis& b) { return Grid{{a, b}}; }

    int dim() const noexcept { return static_cast<int>(axes.size()); }
    std::size_t size() const noexcept;
    /// Point i; in two dimensions i = i1 * n2 + i2.
    std::array<double, 2> point(std::size_t i) const;
};

/// Derivatives of a function on a grid up to `order`. One dimension: derivs[p][k] = f^(k)(x_p).
/// Two dimensions: derivs[p][a * (order + 1) + b] = d1^a d2^b f(p).
struct SampledJet {
    Grid grid;
    std::size_t order = 0;
    std::vector<std::vector<double>> derivs;
    std::optional<Expr> source;

    double mixed(std::size_t p, std::size_t a, std::size_t b) const { return derivs[p][a * (order + 1) + b]; }
};

SampledJet sample_jet(const Expr& e, const Grid& grid, std::size_t order);
/// One-dimensional sampled data without a source expression.
SampledJet sampled_jet_from_data(const Axis& axis, std::vector<std::vector<double>> derivs);

/// Directions sampled on [0, pi) for two-dimensional operator norms.
std::size_t direction_count(std::size_t order) noexcept;

struct Bracket {
    double lower = 0.0;
    double upper = 0.0;
};

/// (diag_sup, (2e)^k diag_sup).
std::pair<double, double> polarization_bracket(double diag_sup, std::size_t k);

/// ||f||_m = sup over K of the norm of f^(m), m = 0..order. One dimension: grid maxima refined
/// by golden-section search when the source is known (lower = upper). Two dimensions: lower is
/// the sampled diagonal sup, upper adds the direction-sampling and polarization factors.
std::vector<Bracket> derivative_sup_norms(const SampledJet& sj);

struct SeminormResult {
    double lower = 0.0;
    double upper = 0.0;
    std::size_t n_at = 0;
    std::size_t point_at = 0;
    std::vector<double> per_order; ///< sup over the grid of the weighted term, lower bracket

    Json to_json() const;
};

/// sup over grid points and n <= N of ||f^(n)(x)|| / (n! rho^n M_n).
SeminormResult seminorm_K_rho(const Expr& e, const Grid& grid, const WeightSequence& m, double rho, std::size_t order);
SeminormResult seminorm_K_rho(const SampledJet& sj, const WeightSequence& m, double rho, std::size_t order);

struct WhitneyValue {
    double value = 0.0;
    std::size_t x_index = 0;
    std::size_t y_index = 0;
};

/// |||f|||_{n,k} for all n + k + 1 <= order, at [n][k].
struct WhitneyTable {
    std::size_t order = 0;
    bool lower_bound_only = false; ///< two-dimensional (directionally sampled)
    bool integral_form = false;    ///< remainders from the integral form of Taylor's theorem
    std::vector<std::vector<WhitneyValue>> entries;

    const WhitneyValue& at(std::size_t n, std::size_t k) const { return entries.at(n).at(k); }
};

WhitneyTable whitney_table(const SampledJet& sj, std::size_t order);
WhitneyValue whitney_remainder_seminorm(const SampledJet& sj, std::size_t n, std::size_t k);

struct TaylorBoundEntry {
    std::size_t n = 0, k = 0;
    double lhs = 0.0; ///< |||f|||_{n,k}
    double rhs = 0.0; ///< ||f||_{n+k+1}
    double weighted_lhs = 0.0; ///< lhs / ((n+k+1)! rho^(n+k+1) M_(n+k+1))
    double weighted_rhs = 0.0;
};

struct TaylorBoundReport {
    std::vector<TaylorBoundEntry> entries;
    std::size_t violations = 0;
    double max_ratio = 0.0;
    Verdict verdict;

    Json to_json() const;
    std::string csv() const;
};

/// |||f|||_{n,k} <= ||f||_{n+k+1} for all n + k + 1 <= N (relative tolerance 1e-6).
TaylorBoundReport verify_taylor_remainder_bound(const SampledJet& sj, const WeightSequence& m, double rho,
                                                std::size_t order);

/// max(sup ||f||_m / (m! r_m M_m), sup |||f|||_{n,k} / ((n+k+1)! r_(n+k+1) M_(n+k+1))) truncated at N.
double general_weight_norm(const SampledJet& sj, const WeightSequence& m, const WeightSequence& r, std::size_t order);
/// ||f||_rho: the same with r_k = rho^k.
double norm_rho(const SampledJet& sj, const WeightSequence& m, double rho, std::size_t order);

struct ExplawReport {
    double rho = 0.0;
    double slack6_min = 0.0; ///< min log((6)-bound / mixed quotient)
    double slack7_min = 0.0; ///< min log((7) / (6)-bound)
    double slack9_min = 0.0; ///< min log(mixed quotient / joint quotient)
    std::size_t violations6 = 0, violations7 = 0, violations9 = 0;
    double sup_slack6 = 0.0, sup_slack7 = 0.0, sup_slack9 = 0.0; ///< same on the sups over x2, k2
    std::size_t checked = 0;
    Verdict verdict;

    Json to_json() const;
};

/// Chain (6) <= (7) and the reverse inequality (9) for the mixed-weight quotients of f(x, y).
ExplawReport explaw_verify(const Expr& e2, const Axis& k1, const Axis& k2, const WeightSequence& m, double sigma,
                           double rho1, double rho2, std::size_t order);

struct CounterexampleRow {
    std::size_t n = 0;
    bool valid = false;   ///< q^n >= n
    double log_term = 0;  ///< log of the lower-bound term
    double log_bound = 0; ///< log(n^n / rho1^n)
};

struct CounterexampleReport {
    double q = 0, rho1 = 0;
    std::vector<CounterexampleRow> rows;
    bool strictly_increasing = false;
    double log_growth = 0; ///< log(last term / first term)
    std::vector<std::pair<double, std::vector<double>>> c_sums; ///< rho -> partial sums of (rho/n)^n
    std::vector<bool> c_stable;
    Verdict verdict;

    Json to_json() const;
    std::string csv() const;
};

CounterexampleReport counterexample_54(double q, std::size_t n_max, double rho1);

/// log((2 rho)^k |f_k| / (k! rho^k M_k)) for f_k = k! M_k, k = 0..kmax; each entry is k log 2.
std::vector<double> dilation_divergence_table(const WeightSequence& m, double rho, std::size_t kmax);

struct FiniteDifferenceCheck {
    double max_rel_error = 0.0;
    std::size_t worst_k = 0;
};

/// d_v^k f against Richardson-extrapolated central differences of d_v^(k-1) f, 1 <= k <= kmax.
/// Errors are relative to max(|d_v^k f|, 1).
FiniteDifferenceCheck finite_difference_check(const Expr& e, double x, double y, double vx, double vy,
                                              std::size_t kmax = 6, double h = 1e-3);

/// Gauss-Legendre nodes and weights on [0, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(std::size_t n);

} // namespace dckit
