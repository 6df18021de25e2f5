#include "dckit/jets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "dckit/analysis.hpp"
#include "dckit/constructions.hpp"
#include "dckit/decimal.hpp"
#include "dckit/error.hpp"
#include "dckit/parallel.hpp"

namespace dckit {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLn10 = 2.302585092994045684017991454684364208;

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r'))
        ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r'))
        --e;
    return std::string(s.substr(b, e - b));
}

// Whole-field decimal; position offsets are relative to `base`.
DecimalToken field_decimal(const std::string& field, std::size_t base) {
    std::size_t pos = 0;
    auto tok = scan_decimal(field, pos);
    if (!tok || pos != field.size())
        throw ParseError(base + (tok ? pos : 0), "decimal number");
    return *tok;
}

SignedLog from_token(const DecimalToken& t) {
    if (t.zero)
        return {};
    return SignedLog::from_log(t.negative ? -1 : 1, t.log_abs);
}

} // namespace

FormalJet FormalJet::from_values(const std::vector<double>& values) {
    FormalJet f;
    for (double v : values) {
        if (!std::isfinite(v))
            throw InvalidParameter("jet coefficients must be finite");
        f.coeffs.push_back(SignedLog::from_linear(v));
    }
    return f;
}

FormalJet FormalJet::zero(std::size_t order) { return FormalJet(std::vector<SignedLog>(order + 1)); }

FormalJet FormalJet::identity(std::size_t order) {
    FormalJet f = zero(order);
    if (order >= 1)
        f.coeffs[1] = SignedLog::from_linear(1.0);
    return f;
}

FormalJet FormalJet::weighted(const WeightSequence& m, std::size_t order) {
    FormalJet f;
    for (std::size_t k = 0; k <= order; ++k)
        f.coeffs.push_back(SignedLog::from_log(1, weighted_log(m, k).log()));
    return f;
}

FormalJet FormalJet::factorial_power(double p, std::size_t order) {
    FormalJet f;
    for (std::size_t k = 0; k <= order; ++k)
        f.coeffs.push_back(SignedLog::from_log(1, p == 1.0 ? log_factorial(k) : p * log_factorial(k)));
    return f;
}

FormalJet FormalJet::geometric(double r, std::size_t order) {
    FormalJet f;
    for (std::size_t k = 0; k <= order; ++k) {
        if (r == 0.0) {
            f.coeffs.push_back(k == 0 ? SignedLog::from_linear(1.0) : SignedLog{});
            continue;
        }
        const int sign = (r < 0 && k % 2 == 1) ? -1 : 1;
        f.coeffs.push_back(SignedLog::from_log(sign, static_cast<double>(k) * std::log(std::fabs(r))));
    }
    return f;
}

std::vector<double> FormalJet::values() const {
    std::vector<double> v;
    for (const auto& c : coeffs)
        v.push_back(c.linear());
    return v;
}

FormalJet parse_jet_csv(const std::string& text) {
    FormalJet f;
    std::size_t offset = 0;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const std::size_t line_start = offset;
        offset += line.size() + 1;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        const std::size_t lead = line.find_first_not_of(" \t");
        std::vector<std::string> fields;
        std::vector<std::size_t> starts;
        std::size_t b = 0;
        while (true) {
            const std::size_t c = t.find(',', b);
            fields.push_back(trim(t.substr(b, c == std::string::npos ? std::string::npos : c - b)));
            starts.push_back(line_start + lead + b);
            if (c == std::string::npos)
                break;
            b = c + 1;
        }
        if (fields.size() != 2 && fields.size() != 3)
            throw ParseError(line_start, "\"k,value\" or \"k,sign,log10magnitude\"");
        std::size_t k = 0;
        try {
            std::size_t used = 0;
            k = std::stoul(fields[0], &used);
            if (used != fields[0].size())
                throw std::invalid_argument("k");
        } catch (const std::exception&) {
            throw ParseError(starts[0], "index");
        }
        if (k != f.coeffs.size())
            throw ParseError(starts[0], "index " + std::to_string(f.coeffs.size()));
        if (fields.size() == 2) {
            f.coeffs.push_back(from_token(field_decimal(fields[1], starts[1])));
            continue;
        }
        int sign = 0;
        if (fields[1] == "1" || fields[1] == "+1")
            sign = 1;
        else if (fields[1] == "-1")
            sign = -1;
        else if (fields[1] != "0")
            throw ParseError(starts[1], "sign -1, 0 or 1");
        double log10mag = kNegInf;
        if (fields[2] != "-inf") {
            const auto tok = field_decimal(fields[2], starts[2]);
            if (!tok.value)
                throw ParseError(starts[2], "finite log10 magnitude");
            log10mag = *tok.value;
        }
        if ((sign == 0) != (log10mag == kNegInf))
            throw ParseError(starts[1], "sign 0 exactly for magnitude -inf");
        f.coeffs.push_back(SignedLog::from_log(sign, log10mag * kLn10));
    }
    if (f.coeffs.empty())
        throw ParseError(0, "at least one coefficient");
    return f;
}

FormalJet read_jet_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw InvalidParameter("cannot open jet file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_jet_csv(buf.str());
}

std::string format_jet_csv(const FormalJet& f) {
    std::string out = "# k,sign,log10magnitude\n";
    for (std::size_t k = 0; k < f.coeffs.size(); ++k) {
        const auto& c = f.coeffs[k];
        out += std::to_string(k) + "," + std::to_string(c.sign) + "," +
               (c.is_zero() ? std::string("-inf") : format_double(c.magnitude.log() / kLn10)) + "\n";
    }
    return out;
}

FormalJet parse_jet_spec(const std::string& spec, std::size_t order) {
    auto starts_with = [&](const char* p) { return spec.rfind(p, 0) == 0; };
    auto number_after = [&](std::size_t at) {
        const auto tok = field_decimal(spec.substr(at), at);
        if (!tok.value)
            throw ParseError(at, "finite number");
        return *tok.value;
    };
    if (starts_with("file:"))
        return read_jet_file(spec.substr(5));
    if (starts_with("values:[")) {
        if (spec.back() != ']')
            throw ParseError(spec.size(), "\"]\"");
        FormalJet f;
        std::size_t b = 8;
        const std::size_t end = spec.size() - 1;
        while (true) {
            const std::size_t c = std::min(spec.find(',', b), end);
            f.coeffs.push_back(from_token(field_decimal(spec.substr(b, c - b), b)));
            if (c == end)
                break;
            b = c + 1;
        }
        return f;
    }
    if (starts_with("factpow:p="))
        return FormalJet::factorial_power(number_after(10), order);
    if (starts_with("geom:r="))
        return FormalJet::geometric(number_after(7), order);
    if (starts_with("kfactm:"))
        return FormalJet::weighted(parse_sequence_spec(spec.substr(7)), order);
    throw ParseError(0, "jet spec (file:, values:[...], factpow:p=, geom:r=, kfactm:)");
}

LogMagnitude jet_norm_rho(const FormalJet& f, const WeightSequence& m, LogMagnitude rho) {
    if (!(rho.is_finite()))
        throw InvalidParameter("rho must be positive and finite");
    double top = kNegInf;
    for (std::size_t k = 0; k < f.coeffs.size(); ++k) {
        if (f.coeffs[k].is_zero())
            continue;
        top = std::max(top, f.coeffs[k].magnitude.log() - static_cast<double>(k) * rho.log() - weighted_log(m, k).log());
    }
    return LogMagnitude::from_log(top);
}

Json MembershipReport::to_json() const {
    Json j;
    j["rho_star"] = json_number(rho_star);
    std::vector<double> g;
    for (std::size_t k = 1; k < log_g.size(); ++k)
        g.push_back(std::exp(log_g[k]));
    j["g"] = json_numbers(g);
    j["roumieu"] = dckit::to_json(roumieu);
    j["beurling"] = dckit::to_json(beurling);
    return j;
}

MembershipReport classify_membership(const FormalJet& f, const WeightSequence& m, const AnalysisConfig& cfg) {
    const std::size_t kmax = f.order();
    if (kmax < 8)
        throw InvalidParameter("classify_membership needs K >= 8");
    MembershipReport out;
    out.log_g.assign(kmax + 1, kNegInf);
    out.log_g[0] = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = 1; k <= kmax; ++k)
        if (!f[k].is_zero())
            out.log_g[k] = (f[k].magnitude.log() - weighted_log(m, k).log()) / static_cast<double>(k);
    double top = kNegInf;
    for (std::size_t k = kmax / 2; k <= kmax; ++k)
        top = std::max(top, out.log_g[k]);
    out.rho_star = top == kNegInf ? 0.0 : std::exp(top);
    out.roumieu = tail::bounded(out.log_g, 1, kmax, cfg, true);
    out.roumieu.property = "roumieu_member";
    out.roumieu.params["rho_star"] = json_number(out.rho_star);
    out.beurling = tail::vanishes(out.log_g, 1, kmax, cfg);
    out.beurling.property = "beurling_member";
    return out;
}

FormalJet compose_jets(const FormalJet& f, const FormalJet& g, std::vector<std::size_t>* cancellation) {
    if (f.coeffs.empty() || g.coeffs.empty())
        throw InvalidParameter("empty jet");
    if (!g[0].is_zero())
        throw NonzeroConstantTerm("g_0 must vanish");
    const std::size_t kmax = std::min(f.order(), g.order());
    if (kmax > kMaxCompositionOrder)
        throw OrderTooLarge("compose_jets supports orders up to " + std::to_string(kMaxCompositionOrder));
    // series coefficients f_j / j! and g_a / a! in sign/log form
    std::vector<double> fl(kmax + 1), gl(kmax + 1);
    std::vector<int> fs(kmax + 1), gs(kmax + 1);
    for (std::size_t k = 0; k <= kmax; ++k) {
        fs[k] = f[k].sign;
        fl[k] = f[k].is_zero() ? kNegInf : f[k].magnitude.log() - log_factorial(k);
        gs[k] = g[k].sign;
        gl[k] = g[k].is_zero() ? kNegInf : g[k].magnitude.log() - log_factorial(k);
    }
    FormalJet h = FormalJet::zero(kmax);
    h.coeffs[0] = f[0];
    std::vector<char> cancelled(kmax + 1, 0);
    parallel_for(kmax, [&](std::size_t i) {
        const std::size_t k = i + 1;
        std::vector<double> logs;
        std::vector<int> signs;
        const std::uint32_t count = 1u << (k - 1);
        for (std::uint32_t mask = 0; mask < count; ++mask) {
            // bit i set: a part ends after position i + 1
            double lg = 0.0;
            int sg = 1;
            std::size_t parts = 0, start = 0;
            bool zero = false;
            for (std::size_t pos = 1; pos <= k && !zero; ++pos) {
                if (pos == k || (mask >> (pos - 1)) & 1u) {
                    const std::size_t a = pos - start;
                    if (gs[a] == 0)
                        zero = true;
                    lg += gl[a];
                    sg *= gs[a];
                    ++parts;
                    start = pos;
                }
            }
            if (zero || fs[parts] == 0)
                continue;
            logs.push_back(lg + fl[parts]);
            signs.push_back(sg * fs[parts]);
        }
        if (logs.empty())
            return;
        const double pivot = *std::max_element(logs.begin(), logs.end());
        LogSumAccumulator pos(pivot), neg(pivot);
        for (std::size_t t = 0; t < logs.size(); ++t)
            (signs[t] > 0 ? pos : neg).add(LogMagnitude::from_log(logs[t]));
        const LogMagnitude p = pos.total(), n = neg.total();
        const LogMagnitude diff = abs_difference(p, n);
        const LogMagnitude big = std::max(p, n);
        if (!n.is_zero() && !p.is_zero() && (diff.is_zero() || diff.log() - big.log() <= std::log(1e-12)))
            cancelled[k] = 1;
        if (diff.is_zero())
            return;
        h.coeffs[k] = SignedLog::from_log(p > n ? 1 : -1, diff.log() + log_factorial(k));
    });
    if (cancellation)
        for (std::size_t k = 1; k <= kmax; ++k)
            if (cancelled[k])
                cancellation->push_back(k);
    return h;
}

Json CompositionBoundReport::to_json() const {
    Json j = dckit::to_json(verdict);
    j["violations"] = violations;
    j["max_slack_log"] = json_number(max_slack_log);
    j["worst_k"] = worst_k;
    std::vector<double> lhs, bound;
    for (std::size_t k = 1; k < lhs_log.size(); ++k) {
        lhs.push_back(lhs_log[k]);
        bound.push_back(bound_log[k]);
    }
    j["lhs_log"] = json_numbers(lhs);
    j["bound_log"] = json_numbers(bound);
    j["cancellation_orders"] = cancellation;
    return j;
}

CompositionBoundReport verify_composition_bound(const FormalJet& f, const FormalJet& g, const WeightSequence& m,
                                                const WeightSequence& l, double rho_f, double c_f, double rho_g,
                                                double c_g) {
    if (!(rho_f > 0 && c_f > 0 && rho_g > 0 && c_g > 0))
        throw InvalidParameter("constants must be positive");
    constexpr double tol = 1e-9;
    const double nf = jet_norm_rho(f, m, rho_f).log();
    if (nf > std::log(c_f) + tol)
        throw CertificateInvalid("|f_j| <= C_f rho_f^j j! M_j fails: need C_f >= " + format_double(std::exp(nf)));
    const double ng = jet_norm_rho(g, l, rho_g).log();
    if (ng > std::log(c_g) + tol)
        throw CertificateInvalid("|g_k| <= C_g rho_g^k k! L_k fails: need C_g >= " + format_double(std::exp(ng)));

    CompositionBoundReport out;
    const FormalJet h = compose_jets(f, g, &out.cancellation);
    const std::size_t kmax = h.order();
    const auto ml = compose_weights(m, l, std::max<std::size_t>(kmax, 1));
    const double growth = std::log(rho_g) + std::log1p(rho_f * c_g);
    const double base = std::log(rho_f) + std::log(c_f) + std::log(c_g) - std::log1p(rho_f * c_g);
    out.lhs_log.assign(kmax + 1, kNegInf);
    out.bound_log.assign(kmax + 1, kNegInf);
    out.max_slack_log = kNegInf;
    std::size_t first_violation = 0;
    for (std::size_t k = 1; k <= kmax; ++k) {
        out.bound_log[k] = static_cast<double>(k) * growth + base;
        out.lhs_log[k] = h[k].is_zero() ? kNegInf : h[k].magnitude.log() - log_factorial(k) - ml[k];
        const double slack = out.lhs_log[k] - out.bound_log[k];
        if (slack > out.max_slack_log) {
            out.max_slack_log = slack;
            out.worst_k = k;
        }
        if (slack > tol) {
            if (out.violations == 0)
                first_violation = k;
            ++out.violations;
        }
    }
    Verdict& v = out.verdict;
    v.property = "composition_bound";
    v.kmax = kmax;
    v.statistic = out.max_slack_log;
    v.params["rho_f"] = rho_f;
    v.params["C_f"] = c_f;
    v.params["rho_g"] = rho_g;
    v.params["C_g"] = c_g;
    v.params["tolerance"] = tol;
    v.params["statistic_meaning"] = "max over k of log(lhs / bound)";
    if (out.violations == 0) {
        v.status = Status::Holds;
        v.witness = {out.worst_k};
    } else {
        v.status = Status::Fails;
        v.witness = {first_violation};
    }
    return out;
}

const char* to_string(DecayClass d) noexcept {
    switch (d) {
    case DecayClass::None:
        return "none";
    case DecayClass::SomeRho:
        return "some-rho";
    case DecayClass::AllRho:
        return "all-rho";
    }
    return "none";
}

TestSequence TestSequence::from_logs(std::vector<double> logs, const AnalysisConfig& cfg) {
    if (logs.size() < 9)
        throw InvalidParameter("test sequence needs kmax >= 8");
    for (double l : logs)
        if (!std::isfinite(l))
            throw InvalidParameter("test sequence must be positive");
    TestSequence t;
    t.logs = std::move(logs);
    const std::size_t kmax = t.kmax();
    t.submultiplicative = true;
    for (std::size_t k = 0; k <= kmax && t.submultiplicative; ++k)
        for (std::size_t l = k; k + l <= kmax; ++l)
            if (t.logs[k] + t.logs[l] < t.logs[k + l] - 1e-9) {
                t.submultiplicative = false;
                break;
            }
    std::vector<double> root(kmax + 1, kNegInf);
    for (std::size_t k = 1; k <= kmax; ++k)
        root[k] = t.logs[k] / static_cast<double>(k);
    if (tail::vanishes(root, 1, kmax, cfg).holds())
        t.decay = DecayClass::AllRho;
    else if (tail::bounded(root, 1, kmax, cfg).holds())
        t.decay = DecayClass::SomeRho;
    else
        t.decay = DecayClass::None;
    return t;
}

TestSequence TestSequence::from_sequence(const WeightSequence& r, std::size_t kmax, const AnalysisConfig& cfg) {
    return from_logs(r.logs(kmax), cfg);
}

Json RadiusReport::to_json() const {
    Json j = dckit::to_json(bounded);
    j["radius_estimate"] = json_number(radius_estimate);
    return j;
}

RadiusReport radius_test(const FormalJet& a, const TestSequence& r, double delta, RadiusDirection direction,
                         const AnalysisConfig& cfg) {
    if (!(delta > 0))
        throw InvalidParameter("delta must be positive");
    if (!r.submultiplicative)
        throw FlagMismatch("test sequence is not submultiplicative");
    if (direction == RadiusDirection::Infinite && r.decay == DecayClass::None)
        throw FlagMismatch("test sequence needs r_k rho^k -> 0 for some rho");
    if (direction == RadiusDirection::Positive && r.decay != DecayClass::AllRho)
        throw FlagMismatch("test sequence needs r_k rho^k -> 0 for all rho");
    const std::size_t kmax = std::min(a.order(), r.kmax());
    if (kmax < 8)
        throw InvalidParameter("radius_test needs at least 9 coefficients");
    std::vector<double> b(kmax + 1, kNegInf);
    for (std::size_t k = 0; k <= kmax; ++k)
        if (!a[k].is_zero())
            b[k] = a[k].magnitude.log() + r.logs[k] + static_cast<double>(k) * std::log(delta);
    RadiusReport out;
    out.bounded = tail::bounded(b, 0, kmax, cfg, true);
    out.bounded.property = "coefficients_times_test_sequence_bounded";
    out.bounded.params["delta"] = delta;
    out.bounded.params["direction"] = direction == RadiusDirection::Infinite ? "infinite-radius" : "positive-radius";
    out.bounded.params["submultiplicative"] = r.submultiplicative;
    out.bounded.params["decay_class"] = to_string(r.decay);
    double top = kNegInf;
    for (std::size_t k = std::max<std::size_t>(1, kmax / 2); k <= kmax; ++k)
        if (!a[k].is_zero())
            top = std::max(top, a[k].magnitude.log() / static_cast<double>(k));
    out.radius_estimate = top == kNegInf ? std::numeric_limits<double>::infinity() : std::exp(-top);
    return out;
}

} // namespace dckit
