#include "dckit/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dckit/constructions.hpp"
#include "dckit/error.hpp"
#include "dckit/parallel.hpp"

namespace dckit {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double exp_or_zero(double log_value) { return log_value == kNegInf ? 0.0 : std::exp(log_value); }

bool nondecreasing(const std::vector<double>& s, std::size_t from, std::size_t to, double tol) {
    for (std::size_t k = from; k < to; ++k)
        if (s[k + 1] < s[k] - tol)
            return false;
    return true;
}

bool nonincreasing(const std::vector<double>& s, std::size_t from, std::size_t to, double tol) {
    for (std::size_t k = from; k < to; ++k)
        if (s[k + 1] > s[k] + tol)
            return false;
    return true;
}

void require(bool ok, const std::string& what) {
    if (!ok)
        throw InvalidParameter(what);
}

Verdict convexity(const std::vector<double>& logs, std::size_t kmax, const char* property, const AnalysisConfig& cfg) {
    Verdict v;
    v.property = property;
    v.kmax = kmax;
    v.status = Status::Holds;
    double min_second = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k + 1 <= kmax; ++k) {
        const double second = logs[k - 1] + logs[k + 1] - 2.0 * logs[k];
        min_second = std::min(min_second, second);
        if (second < -cfg.convex_tol && v.status == Status::Holds) {
            v.status = Status::Fails;
            v.witness = {k};
        }
    }
    v.statistic = min_second;
    v.params["tolerance"] = cfg.convex_tol;
    v.params["statistic_meaning"] = "minimum second difference of the log values";
    return v;
}

} // namespace

namespace tail {

Verdict bounded(const std::vector<double>& log_s, std::size_t first, std::size_t last, const AnalysisConfig& cfg,
                bool allow_fail) {
    Verdict v;
    v.kmax = last;
    double running = kNegInf;
    std::size_t argmax = first;
    const std::size_t q = std::max(first, (3 * last) / 4);
    double at_q = kNegInf;
    for (std::size_t k = first; k <= last; ++k) {
        if (log_s[k] > running) {
            running = log_s[k];
            argmax = k;
        }
        if (k == q)
            at_q = running;
    }
    v.statistic = exp_or_zero(running);
    v.witness = {argmax};
    v.params["log_statistic"] = json_number(running);
    v.params["running_max_at_three_quarters"] = json_number(exp_or_zero(at_q));
    if (running == kNegInf || running <= at_q + std::log1p(cfg.stab_tol)) {
        v.status = Status::Holds;
        return v;
    }
    const std::size_t half = std::max(first, last / 2);
    if (allow_fail && nondecreasing(log_s, half, last, cfg.convex_tol) &&
        log_s[last] >= log_s[half] + std::log(cfg.growth_factor)) {
        v.status = Status::Fails;
        v.witness = {last};
        v.note = "monotone divergence over the last half";
        return v;
    }
    v.status = Status::Inconclusive;
    v.note = "running max still growing over the last quarter; a finite truncation cannot refute boundedness";
    return v;
}

Verdict vanishes(const std::vector<double>& log_s, std::size_t first, std::size_t last, const AnalysisConfig& cfg) {
    Verdict v;
    v.kmax = last;
    const std::size_t half = std::max(first, last / 2);
    v.statistic = exp_or_zero(log_s[last]);
    v.params["value_at_half"] = json_number(exp_or_zero(log_s[half]));
    bool all_zero = true;
    std::size_t argmin = half;
    for (std::size_t k = half; k <= last; ++k) {
        all_zero = all_zero && log_s[k] == kNegInf;
        if (log_s[k] < log_s[argmin])
            argmin = k;
    }
    if (all_zero) {
        v.status = Status::Holds;
        return v;
    }
    if (nonincreasing(log_s, half, last, cfg.convex_tol) && log_s[last] <= log_s[half] + std::log(cfg.decay_factor)) {
        v.status = Status::Holds;
        return v;
    }
    if (log_s[argmin] >= log_s[half] - std::log1p(cfg.stab_tol)) {
        v.status = Status::Fails;
        v.witness = {argmin};
        v.note = "no decay beyond the stabilization tolerance over the last half";
        return v;
    }
    v.status = Status::Inconclusive;
    v.note = "decay too slow to clear the decay-factor test";
    return v;
}

Verdict diverges(const std::vector<double>& log_s, std::size_t first, std::size_t last, const AnalysisConfig& cfg) {
    Verdict v;
    v.kmax = last;
    const std::size_t half = std::max(first, last / 2);
    double running_half = kNegInf;
    for (std::size_t k = first; k <= half; ++k)
        running_half = std::max(running_half, log_s[k]);
    double max_tail = kNegInf;
    for (std::size_t k = half; k <= last; ++k)
        max_tail = std::max(max_tail, log_s[k]);
    v.statistic = exp_or_zero(log_s[last]);
    v.params["value_at_half"] = json_number(exp_or_zero(log_s[half]));
    if (nondecreasing(log_s, half, last, cfg.convex_tol) && log_s[last] != kNegInf &&
        log_s[last] >= log_s[half] + std::log(cfg.growth_factor)) {
        v.status = Status::Holds;
        return v;
    }
    const double bound = running_half + std::log1p(cfg.stab_tol);
    if (log_s[last] <= bound && max_tail <= bound) {
        v.status = Status::Fails;
        v.witness = {last};
        v.note = "flat trend over the last half";
        return v;
    }
    v.status = Status::Inconclusive;
    return v;
}

} // namespace tail

Verdict is_log_convex(const WeightSequence& m, std::size_t kmax, const AnalysisConfig& cfg) {
    require(kmax >= 2, "is_log_convex needs kmax >= 2");
    return convexity(m.logs(kmax), kmax, "log_convex", cfg);
}

Verdict is_weakly_log_convex(const WeightSequence& m, std::size_t kmax, const AnalysisConfig& cfg) {
    require(kmax >= 2, "is_weakly_log_convex needs kmax >= 2");
    auto logs = m.logs(kmax);
    for (std::size_t k = 0; k <= kmax; ++k)
        logs[k] += log_factorial(k);
    return convexity(logs, kmax, "weakly_log_convex", cfg);
}

SupEstimate derivation_closure_sup(const WeightSequence& m, std::size_t kmax, const AnalysisConfig& cfg) {
    require(kmax >= 2, "derivation_closure_sup needs kmax >= 2");
    const auto logs = m.logs(kmax + 1);
    std::vector<double> s(kmax + 1, kNegInf);
    for (std::size_t k = 1; k <= kmax; ++k)
        s[k] = (logs[k + 1] - logs[k]) / static_cast<double>(k);
    SupEstimate out;
    out.verdict = tail::bounded(s, 1, kmax, cfg, true);
    out.verdict.property = "derivation_closed";
    out.verdict.params["tail_value"] = json_number(std::exp(s[kmax]));
    out.sup = out.verdict.statistic;
    return out;
}

double moderate_growth_log_quotient(const std::vector<double>& logs, std::size_t j, std::size_t k) {
    return (logs[j + k] - logs[j] - logs[k]) / static_cast<double>(j + k);
}

SupEstimate moderate_growth_sup(const WeightSequence& m, std::size_t kmax, const AnalysisConfig& cfg) {
    require(kmax >= 2, "moderate_growth_sup needs kmax >= 2");
    const auto logs = m.logs(kmax);
    // best quotient per total order s = j + k, smallest j on ties
    std::vector<double> best(kmax + 1, kNegInf);
    std::vector<std::size_t> best_j(kmax + 1, 1);
    parallel_for(kmax - 1, [&](std::size_t i) {
        const std::size_t s = i + 2;
        double b = kNegInf;
        std::size_t bj = 1;
        for (std::size_t j = 1; j < s; ++j) {
            const double qv = moderate_growth_log_quotient(logs, j, s - j);
            if (qv > b) {
                b = qv;
                bj = j;
            }
        }
        best[s] = b;
        best_j[s] = bj;
    });
    double top = kNegInf;
    std::size_t tj = 1, tk = 1;
    for (std::size_t s = 2; s <= kmax; ++s) {
        const std::size_t j = best_j[s], k = s - j;
        if (best[s] > top || (best[s] == top && (j < tj || (j == tj && k < tk)))) {
            top = best[s];
            tj = j;
            tk = k;
        }
    }
    SupEstimate out;
    out.verdict = tail::bounded(best, 2, kmax, cfg, true);
    out.verdict.property = "moderate_growth";
    out.verdict.witness = {tj, tk};
    out.verdict.statistic = std::exp(top);
    out.verdict.params["log_statistic"] = top;
    out.sup = out.verdict.statistic;
    return out;
}

double ratio_root_sup(const WeightSequence& m, const WeightSequence& n, std::size_t kmax) {
    require(kmax >= 1, "ratio_root_sup needs kmax >= 1");
    double top = kNegInf;
    for (std::size_t k = 1; k <= kmax; ++k)
        top = std::max(top, (m.eval_log(k).log() - n.eval_log(k).log()) / static_cast<double>(k));
    return std::exp(top);
}

namespace {

std::vector<double> log_ratio_roots(const WeightSequence& m, const WeightSequence& n, std::size_t kmax) {
    std::vector<double> r(kmax + 1, kNegInf);
    for (std::size_t k = 1; k <= kmax; ++k)
        r[k] = (m.eval_log(k).log() - n.eval_log(k).log()) / static_cast<double>(k);
    return r;
}

} // namespace

Verdict triangle_lhd(const WeightSequence& m, const WeightSequence& n, std::size_t kmax, const AnalysisConfig& cfg) {
    require(kmax >= 8, "triangle_lhd needs kmax >= 8");
    Verdict v = tail::vanishes(log_ratio_roots(m, n, kmax), 1, kmax, cfg);
    v.property = "M_lhd_N";
    v.params["decay_factor"] = cfg.decay_factor;
    return v;
}

Json InclusionReport::to_json() const {
    Json j;
    j["beurling_inclusion"] = dckit::to_json(beurling);
    j["roumieu_inclusion"] = dckit::to_json(roumieu);
    j["roumieu_into_beurling"] = dckit::to_json(roumieu_into_beurling);
    return j;
}

InclusionReport inclusion_relation(const WeightSequence& m, const WeightSequence& n, std::size_t kmax,
                                   const AnalysisConfig& cfg) {
    require(kmax >= 8, "inclusion_relation needs kmax >= 8");
    InclusionReport out;
    Verdict same = tail::bounded(log_ratio_roots(m, n, kmax), 1, kmax, cfg, true);
    same.params["stab_tol"] = cfg.stab_tol;
    same.params["statistic_meaning"] = "sup_k (M_k/N_k)^(1/k)";
    out.beurling = same;
    out.beurling.property = "beurling_M_in_beurling_N";
    out.roumieu = same;
    out.roumieu.property = "roumieu_M_in_roumieu_N";
    out.roumieu_into_beurling = triangle_lhd(m, n, kmax, cfg);
    out.roumieu_into_beurling.property = "roumieu_M_in_beurling_N";
    return out;
}

Json QuasianalyticityReport::to_json() const {
    Json j = dckit::to_json(verdict);
    j["criterion"] = criterion;
    j["tail_exponent"] = json_number(tail_exponent);
    Json sums = Json::array();
    for (const auto& [k, s] : partial_sums)
        sums.push_back(Json::array({k, json_number(s)}));
    j["partial_sums"] = sums;
    return j;
}

QuasianalyticityReport quasianalytic_verdict(const WeightSequence& m, int criterion, std::size_t kmax,
                                             const AnalysisConfig& cfg) {
    require(criterion >= 2 && criterion <= 4, "criterion must be 2, 3 or 4");
    require(kmax >= 32, "quasianalytic_verdict needs kmax >= 32");
    std::vector<double> terms(kmax + 1, kNegInf);
    std::size_t first = 1, last = kmax, fit_last = kmax;
    if (criterion == 2) {
        const auto im = increasing_minorant(m, kmax);
        for (std::size_t k = 1; k <= kmax; ++k)
            terms[k] = -im.logs[k];
    } else {
        const auto lc = log_convex_minorant(m, kmax);
        if (criterion == 3) {
            for (std::size_t k = 1; k <= kmax; ++k)
                terms[k] = -lc.logs[k] / static_cast<double>(k);
        } else {
            first = 0;
            last = kmax - 1;
            for (std::size_t k = 0; k < kmax; ++k)
                terms[k] = lc.logs[k] - lc.logs[k + 1];
        }
        // the last hull segment depends on the truncation point
        if (lc.sensitive_from >= kmax / 2 + 8)
            fit_last = std::min(last, lc.sensitive_from);
        else
            fit_last = last;
    }
    fit_last = std::min(fit_last, last);

    QuasianalyticityReport out;
    out.criterion = criterion;
    std::size_t positive = 0;
    LogSumAccumulator acc;
    for (std::size_t k = first; k <= last; ++k) {
        if (terms[k] != kNegInf)
            ++positive;
        acc.add(LogMagnitude::from_log(terms[k]));
        out.partial_sums.emplace_back(k, acc.total().linear());
    }
    if (positive < 8)
        throw DegenerateFit("fewer than 8 positive terms");

    const std::size_t fit_first = std::max<std::size_t>(1, fit_last / 2);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t count = 0;
    for (std::size_t k = fit_first; k <= fit_last; ++k) {
        if (terms[k] == kNegInf)
            continue;
        const double x = std::log(static_cast<double>(k));
        sx += x;
        sy += terms[k];
        sxx += x * x;
        sxy += x * terms[k];
        ++count;
    }
    if (count < 8)
        throw DegenerateFit("fewer than 8 positive terms in the fit window");
    const double n = static_cast<double>(count);
    const double denom = n * sxx - sx * sx;
    if (!(denom > 0))
        throw DegenerateFit("singular fit");
    const double slope = (n * sxy - sx * sy) / denom;
    const double p = -slope;
    out.tail_exponent = p;

    // harmonic comparison: k * term_k nondecreasing means term_k >= c / k on the window
    bool harmonic = true;
    for (std::size_t k = fit_first; k < fit_last; ++k) {
        const double a = std::log(static_cast<double>(k)) + terms[k];
        const double b = std::log(static_cast<double>(k + 1)) + terms[k + 1];
        if (!(b >= a - cfg.convex_tol)) {
            harmonic = false;
            break;
        }
    }

    Verdict& v = out.verdict;
    v.property = "quasianalytic";
    v.kmax = kmax;
    v.statistic = p;
    v.params["criterion"] = criterion;
    v.params["margin"] = cfg.qa_margin;
    v.params["fit_window"] = Json::array({fit_first, fit_last});
    v.params["harmonic_comparison"] = harmonic;
    v.params["partial_sum"] = json_number(out.partial_sums.back().second);
    if (p <= 1.0 - cfg.qa_margin || (p < 1.0 + cfg.qa_margin && harmonic)) {
        v.status = Status::Holds;
        if (p > 1.0 - cfg.qa_margin)
            v.note = "exponent within the margin of 1; k * term_k nondecreasing over the fit window";
    } else if (p >= 1.0 + cfg.qa_margin) {
        v.status = Status::Fails;
        v.witness = {fit_last};
    } else {
        v.status = Status::Inconclusive;
    }
    return out;
}

LimitReport limit_conditions(const WeightSequence& m, std::size_t kmax, const AnalysisConfig& cfg) {
    require(kmax >= 8, "limit_conditions needs kmax >= 8");
    const auto logs = m.logs(kmax);
    std::vector<double> ratio(kmax, kNegInf), root(kmax + 1, kNegInf);
    for (std::size_t k = 0; k < kmax; ++k)
        ratio[k] = logs[k + 1] - logs[k];
    for (std::size_t k = 1; k <= kmax; ++k)
        root[k] = logs[k] / static_cast<double>(k);
    LimitReport out;
    out.ratio = tail::diverges(ratio, 0, kmax - 1, cfg);
    out.ratio.property = "ratio_tends_to_infinity";
    out.ratio.params["growth_factor"] = cfg.growth_factor;
    out.root = tail::diverges(root, 1, kmax, cfg);
    out.root.property = "root_tends_to_infinity";
    out.root.params["growth_factor"] = cfg.growth_factor;
    return out;
}

Json classify(const WeightSequence& m, std::size_t kmax, const AnalysisConfig& cfg) {
    Json j;
    j["sequence"] = m.render();
    j["kmax"] = kmax;
    j["config"] = cfg.to_json();
    Json props = Json::array();
    props.push_back(to_json(is_log_convex(m, kmax, cfg)));
    props.push_back(to_json(is_weakly_log_convex(m, kmax, cfg)));
    const auto hint = m.kmax_hint();
    const std::size_t dc_kmax = (hint && *hint <= kmax) ? kmax - 1 : kmax;
    if (dc_kmax >= 2)
        props.push_back(to_json(derivation_closure_sup(m, dc_kmax, cfg).verdict));
    props.push_back(to_json(moderate_growth_sup(m, kmax, cfg).verdict));
    if (kmax >= 8) {
        const auto lim = limit_conditions(m, kmax, cfg);
        props.push_back(to_json(lim.ratio));
        props.push_back(to_json(lim.root));
        const auto analytic = inclusion_relation(WeightSequence::constant(), m, kmax, cfg);
        Verdict a = analytic.roumieu;
        a.property = "analytic_in_roumieu";
        props.push_back(to_json(a));
        Verdict b = analytic.roumieu_into_beurling;
        b.property = "analytic_in_beurling";
        props.push_back(to_json(b));
    }
    j["properties"] = props;
    Json qa = Json::array();
    if (kmax >= 32) {
        for (int c = 2; c <= 4; ++c) {
            try {
                qa.push_back(quasianalytic_verdict(m, c, kmax, cfg).to_json());
            } catch (const DegenerateFit& e) {
                Json err;
                err["criterion"] = c;
                err["error"] = e.what();
                qa.push_back(err);
            }
        }
    }
    j["quasianalyticity"] = qa;
    return j;
}

} // namespace dckit
