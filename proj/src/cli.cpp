#include "dckit/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "dckit/analysis.hpp"
#include "dckit/constructions.hpp"
#include "dckit/decimal.hpp"
#include "dckit/error.hpp"
#include "dckit/expr.hpp"
#include "dckit/jetnorms.hpp"
#include "dckit/jets.hpp"
#include "dckit/report.hpp"
#include "dckit/weight_sequence.hpp"

namespace dckit::cli {

namespace {

constexpr std::size_t kDefaultKmax = 256;
constexpr std::size_t kDefaultJetOrder = 64;
constexpr std::size_t kDefaultOrder = 12;
constexpr const char* kDefaultGrid = "0,1,64";

class UsageError : public Error {
public:
    using Error::Error;
};

struct Outcome {
    Json doc;
    int code = 0;
    std::string csv;
    std::string seq;
};

Json defaults_json() {
    Json d;
    d["kmax"] = kDefaultKmax;
    d["jet_order"] = kDefaultJetOrder;
    d["order"] = kDefaultOrder;
    d["grid"] = kDefaultGrid;
    d["config"] = AnalysisConfig{}.to_json();
    return d;
}

Json envelope(const std::string& command, Json params, const AnalysisConfig& cfg, Json report) {
    Json j;
    j["command"] = command;
    j["parameters"] = std::move(params);
    j["config"] = cfg.to_json();
    j["defaults"] = defaults_json();
    j["report"] = std::move(report);
    return j;
}

std::size_t resolve_kmax(const WeightSequence& m, const CLI::Option* opt, std::size_t given,
                         std::size_t dflt = kDefaultKmax) {
    const auto hint = m.kmax_hint();
    if (opt->count() > 0) {
        if (hint && given > *hint)
            throw UsageError("--kmax " + std::to_string(given) + " exceeds the stored data of " + m.render() +
                             " (last index " + std::to_string(*hint) + ")");
        return given;
    }
    return hint ? std::min(dflt, *hint) : dflt;
}

std::string log_table_csv(const std::vector<double>& logs, std::size_t first = 0) {
    std::ostringstream os;
    os << "k,log_value\n";
    for (std::size_t k = first; k < logs.size(); ++k)
        os << k << ',' << format_double(logs[k]) << '\n';
    return os.str();
}

Grid parse_grid(const std::vector<std::string>& axes) {
    if (axes.empty() || axes.size() > 2)
        throw UsageError("--grid must be given once (1-D) or twice (2-D)");
    Grid g;
    for (const auto& a : axes)
        g.axes.push_back(parse_axis(a));
    return g;
}

Expr parse_function(const std::string& text, const std::optional<double>& at_y, int dim) {
    Expr e = parse_expr(text);
    if (at_y)
        e = e.substitute('y', Expr::constant(*at_y));
    else if (dim == 1 && e.uses('y'))
        throw UsageError("expression uses y on a 1-D grid; pass --at-y to restrict to a slice");
    return e;
}

void human_lines(const Json& j, const std::string& prefix, std::ostream& os) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it)
            human_lines(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), os);
    } else if (j.is_array() && !j.empty() && (j.front().is_object() || j.front().is_array())) {
        for (std::size_t i = 0; i < j.size(); ++i)
            human_lines(j[i], prefix + "[" + std::to_string(i) + "]", os);
    } else {
        std::string v = dump_json(j, -1);
        if (!v.empty() && v.back() == '\n')
            v.pop_back();
        os << prefix << ": " << v << '\n';
    }
}

std::string render_human(const Json& doc) {
    std::ostringstream os;
    human_lines(doc, "", os);
    return os.str();
}

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f)
        throw UsageError("cannot write " + p.string());
    f << text;
}

/// Jet with its constant term replaced by 0.
FormalJet drop_constant(FormalJet f) {
    if (!f.coeffs.empty())
        f.coeffs[0] = SignedLog{};
    return f;
}

struct CookbookResult {
    bool pass = false;
    Json inputs;
    Json report;
    std::vector<std::string> checks;
};

CookbookResult run_section(const std::string& section) {
    CookbookResult r;
    auto check = [&](bool ok, const std::string& what) {
        r.checks.push_back(std::string(ok ? "PASS " : "FAIL ") + what);
        return ok;
    };
    const AnalysisConfig cfg;
    if (section == "thm2.2") {
        r.inputs = {{"sequences", {"const:1", "gevrey:s=1"}}, {"kmax", 512}, {"criteria", {2, 3, 4}}};
        bool ok = true;
        for (const char* spec : {"const:1", "gevrey:s=1"}) {
            const auto m = parse_sequence_spec(spec);
            Json per;
            for (int c = 2; c <= 4; ++c) {
                const auto q = quasianalytic_verdict(m, c, 512, cfg);
                per["criterion" + std::to_string(c)] = q.to_json();
                const bool want_qa = std::string(spec) == "const:1";
                if (c == 2)
                    ok = check(want_qa ? q.verdict.holds() : q.verdict.fails(),
                               std::string(spec) + (want_qa ? " quasianalytic" : " non-quasianalytic") +
                                   " (criterion 2)") &&
                         ok;
            }
            r.report[spec] = per;
        }
        r.pass = ok;
    } else if (section == "thm2.4") {
        const std::size_t order = 256;
        r.inputs = {{"sequence", "const:1"}, {"jet", "factpow:p=2"}, {"order", order}};
        const auto m = WeightSequence::constant();
        const auto f = FormalJet::factorial_power(2.0, order);
        const auto res = majorant_construction(m, f);
        const auto diag = res.diagnostics();
        r.report = diag;
        bool ok = true;
        double worst = 0.0;
        for (std::size_t j = 0; j < res.nodes.size(); ++j) {
            const double want = static_cast<double>(j + 1);
            worst = std::max(worst, std::fabs(std::exp(res.nodes[j].log_witness) - want) / want);
        }
        ok = check(worst <= 1e-9, "witness identity (|f_kj|/(kj! L_kj))^(1/kj) = j+1, max rel error " +
                                      format_double(worst)) && ok;
        ok = check(diag["phi_convex"].get<bool>(), "phi convex") && ok;
        ok = check(diag["phi_over_k_nondecreasing"].get<bool>(), "phi(k)/k nondecreasing") && ok;
        ok = check(diag["L_weakly_log_convex"].get<bool>(), "L weakly log-convex") && ok;
        r.pass = ok;
    } else if (section == "lemma2.5") {
        const std::size_t order = 15;
        r.inputs = {{"f", "f_j = j!"}, {"g", "g_k = k!, g_0 = 0"}, {"M", "const:1"}, {"L", "const:1"},
                    {"rho_f", 1}, {"C_f", 1}, {"rho_g", 1}, {"C_g", 1}, {"order", order}};
        const auto f = FormalJet::factorial_power(1.0, order);
        const auto g = drop_constant(FormalJet::factorial_power(1.0, order));
        const auto one = WeightSequence::constant();
        const auto rep = verify_composition_bound(f, g, one, one, 1.0, 1.0, 1.0, 1.0);
        r.report = rep.to_json();
        r.pass = check(rep.violations == 0, "composition bound, zero violations");
    } else if (section == "sec3.1") {
        const std::size_t order = 8;
        r.inputs = {{"expr", "exp(x)"}, {"grid", kDefaultGrid}, {"order", order}, {"sequence", "const:1"}, {"rho", 1}};
        const auto sj = sample_jet(parse_expr("exp(x)"), Grid::line(parse_axis(kDefaultGrid)), order);
        const auto rep = verify_taylor_remainder_bound(sj, WeightSequence::constant(), 1.0, order);
        r.report = rep.to_json();
        r.pass = check(rep.verdict.holds(), "Taylor remainder bound on exp, [0,1], N=8");
    } else if (section == "sec5.2") {
        const std::size_t order = 8;
        r.inputs = {{"expr", "exp(x+y)"}, {"grid1", kDefaultGrid}, {"grid2", kDefaultGrid}, {"sequence", "const:1"},
                    {"sigma", 1}, {"rho1", 1}, {"rho2", 1}, {"order", order}};
        const Axis ax = parse_axis(kDefaultGrid);
        const auto rep =
            explaw_verify(parse_expr("exp(x+y)"), ax, ax, WeightSequence::constant(), 1.0, 1.0, 1.0, order);
        r.report = rep.to_json();
        bool ok = check(rep.violations9 == 0, "direction (9), zero violations");
        ok = check(rep.violations6 == 0 && rep.violations7 == 0 && rep.sup_slack6 >= 0 && rep.sup_slack7 >= 0,
                   "chain (6) <= (7), slack >= 0") && ok;
        r.pass = ok;
    } else if (section == "sec5.4") {
        r.inputs = {{"q", 2}, {"n_max", 8}, {"rho1", 1}};
        const auto rep = counterexample_54(2.0, 8, 1.0);
        r.report = rep.to_json();
        r.report["dilation_log_table"] = json_numbers(dilation_divergence_table(WeightSequence::gevrey(1.0), 1.0, 16));
        bool ok = check(rep.strictly_increasing, "table strictly increasing");
        ok = check(!rep.rows.empty() && rep.rows.back().log_term >= std::log(16777216.0), "row 8 >= 8^8") && ok;
        ok = check(rep.verdict.holds(), "divergence verdict, C(rho) partial sums stabilize") && ok;
        r.pass = ok;
    } else {
        throw UnknownSection("unknown cookbook section '" + section + "'");
    }
    return r;
}

} // namespace

const std::vector<std::string>& cookbook_sections() {
    static const std::vector<std::string> s{"thm2.2", "thm2.4", "lemma2.5", "sec3.1", "sec5.2", "sec5.4"};
    return s;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Denjoy-Carleman class toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string format = "json", output;
    AnalysisConfig cfg;
    app.add_option("--format", format, "json, csv, human or seq")
        ->check(CLI::IsMember({"json", "csv", "human", "seq"}));
    app.add_option("--output,-o", output, "write the report to this file");
    app.add_option("--convex-tol", cfg.convex_tol, "additive log tolerance of convexity checks");
    app.add_option("--stab-tol", cfg.stab_tol, "relative growth allowed for 'bounded'");
    app.add_option("--decay-factor", cfg.decay_factor, "required decay for 'tends to 0'");
    app.add_option("--growth-factor", cfg.growth_factor, "required growth for 'tends to infinity'");
    app.add_option("--qa-margin", cfg.qa_margin, "margin around p = 1 in the quasianalyticity fit");

    std::function<Outcome()> action;
    auto sub = [&](const char* name, const char* desc) { return app.add_subcommand(name, desc); };

    // classify
    std::string seq = "const:1";
    std::size_t kmax = kDefaultKmax;
    {
        auto* c = sub("classify", "property matrix of a weight sequence");
        c->add_option("--seq", seq, "sequence spec")->required();
        auto* ko = c->add_option("--kmax", kmax, "truncation index");
        c->callback([&, ko] {
            action = [&, ko] {
                const auto m = parse_sequence_spec(seq);
                const auto k = resolve_kmax(m, ko, kmax);
                Outcome o;
                o.doc = envelope("classify", {{"seq", seq}, {"kmax", k}}, cfg, classify(m, k, cfg));
                return o;
            };
        });
    }
    // compare
    std::string seq_m, seq_n;
    {
        auto* c = sub("compare", "inclusion relations between two classes");
        c->add_option("--m", seq_m, "first sequence")->required();
        c->add_option("--n", seq_n, "second sequence")->required();
        auto* ko = c->add_option("--kmax", kmax, "truncation index");
        c->callback([&, ko] {
            action = [&, ko] {
                const auto m = parse_sequence_spec(seq_m), n = parse_sequence_spec(seq_n);
                const auto k = std::min(resolve_kmax(m, ko, kmax), resolve_kmax(n, ko, kmax));
                Outcome o;
                o.doc = envelope("compare", {{"m", seq_m}, {"n", seq_n}, {"kmax", k}}, cfg,
                                 inclusion_relation(m, n, k, cfg).to_json());
                return o;
            };
        });
    }
    // minorant
    std::string kind = "logconvex";
    {
        auto* c = sub("minorant", "minorants of (k! M_k)");
        c->add_option("--seq", seq, "sequence spec")->required();
        auto* ko = c->add_option("--kmax", kmax, "truncation index");
        c->add_option("--kind", kind, "logconvex or increasing")->check(CLI::IsMember({"logconvex", "increasing"}));
        c->callback([&, ko] {
            action = [&, ko] {
                const auto m = parse_sequence_spec(seq);
                const auto k = resolve_kmax(m, ko, kmax);
                Outcome o;
                Json rep;
                rep["kind"] = kind;
                if (kind == "logconvex") {
                    const auto lc = log_convex_minorant(m, k);
                    rep["logs"] = json_numbers(lc.logs);
                    rep["vertices"] = lc.vertices;
                    rep["sensitive_from"] = lc.sensitive_from;
                    o.csv = log_table_csv(lc.logs);
                    o.seq = format_sequence_lines(lc.logs);
                } else {
                    const auto inc = increasing_minorant(m, k);
                    rep["logs"] = json_numbers(inc.logs);
                    rep["truncation_caveat"] = inc.truncation_caveat;
                    o.csv = log_table_csv(inc.logs, 1);
                }
                o.doc = envelope("minorant", {{"seq", seq}, {"kmax", k}, {"kind", kind}}, cfg, rep);
                return o;
            };
        });
    }
    // majorant
    std::string jet_spec, diag_path;
    std::size_t order = kDefaultJetOrder;
    bool skip_convexity = false;
    {
        auto* c = sub("majorant", "weight L with f in the L-class");
        c->add_option("--seq", seq, "sequence M")->required();
        c->add_option("--jet", jet_spec, "jet spec")->required();
        c->add_option("--order", order, "jet truncation");
        c->add_option("--diagnostics", diag_path, "write the JSON diagnostics sidecar here");
        c->add_flag("--skip-convexity-check", skip_convexity, "allow M without weak log-convexity");
        c->callback([&] {
            action = [&] {
                const auto m = parse_sequence_spec(seq);
                const auto f = parse_jet_spec(jet_spec, order);
                MajorantOptions opt;
                opt.skip_convexity_check = skip_convexity;
                const auto res = majorant_construction(m, f, opt);
                const auto diag = res.diagnostics();
                if (!diag_path.empty())
                    write_file(diag_path, dump_json(diag));
                Json rep;
                rep["L"] = json_numbers(res.logs);
                rep["diagnostics"] = diag;
                Outcome o;
                o.doc = envelope("majorant",
                                 {{"seq", seq}, {"jet", jet_spec}, {"order", f.order()},
                                  {"skip_convexity_check", skip_convexity}},
                                 cfg, rep);
                o.csv = log_table_csv(res.logs);
                o.seq = format_sequence_lines(res.logs);
                return o;
            };
        });
    }
    // compose-weights
    std::string seq_l;
    {
        auto* c = sub("compose-weights", "composed weight (M o L)");
        c->add_option("--m", seq_m, "outer sequence")->required();
        c->add_option("--l", seq_l, "inner sequence")->required();
        auto* ko = c->add_option("--kmax", kmax, "truncation index");
        c->callback([&, ko] {
            action = [&, ko] {
                const auto m = parse_sequence_spec(seq_m), l = parse_sequence_spec(seq_l);
                const auto k = std::min(resolve_kmax(m, ko, kmax), resolve_kmax(l, ko, kmax));
                const auto logs = compose_weights(m, l, k);
                Outcome o;
                o.doc = envelope("compose-weights", {{"m", seq_m}, {"l", seq_l}, {"kmax", k}}, cfg,
                                 {{"logs", json_numbers(logs)}});
                o.csv = log_table_csv(logs);
                o.seq = format_sequence_lines(logs);
                return o;
            };
        });
    }
    // jet-classify
    {
        auto* c = sub("jet-classify", "Roumieu/Beurling membership of a formal jet");
        c->add_option("--jet", jet_spec, "jet spec")->required();
        c->add_option("--seq", seq, "sequence M");
        c->add_option("--order", order, "jet truncation");
        c->callback([&] {
            action = [&] {
                const auto m = parse_sequence_spec(seq);
                const auto f = parse_jet_spec(jet_spec, order);
                Outcome o;
                o.doc = envelope("jet-classify", {{"jet", jet_spec}, {"seq", seq}, {"order", f.order()}}, cfg,
                                 classify_membership(f, m, cfg).to_json());
                return o;
            };
        });
    }
    // jet-compose / jet-bound
    std::string jet_f, jet_g;
    bool zero_constant = false;
    std::size_t comp_order = kDefaultOrder;
    auto load_fg = [&] {
        const auto f = parse_jet_spec(jet_f, comp_order);
        auto g = parse_jet_spec(jet_g, comp_order);
        if (zero_constant)
            g = drop_constant(g);
        return std::pair{f, g};
    };
    auto jet_values_json = [](const FormalJet& f) {
        Json a = Json::array();
        for (std::size_t k = 0; k <= f.order(); ++k) {
            const auto& c = f[k];
            a.push_back({{"k", k}, {"sign", c.sign}, {"log", json_number(c.magnitude.log())}});
        }
        return a;
    };
    {
        auto* c = sub("jet-compose", "Faa di Bruno composition f o g");
        c->add_option("--f", jet_f, "outer jet")->required();
        c->add_option("--g", jet_g, "inner jet (g_0 = 0)")->required();
        c->add_option("--order", comp_order, "truncation for generated jets");
        c->add_flag("--zero-constant", zero_constant, "set g_0 = 0");
        c->callback([&] {
            action = [&] {
                const auto [f, g] = load_fg();
                std::vector<std::size_t> canc;
                const auto h = compose_jets(f, g, &canc);
                Json rep;
                rep["order"] = h.order();
                rep["coefficients"] = jet_values_json(h);
                rep["cancellation"] = canc;
                Outcome o;
                o.doc = envelope("jet-compose",
                                 {{"f", jet_f}, {"g", jet_g}, {"order", comp_order}, {"zero_constant", zero_constant}},
                                 cfg, rep);
                o.csv = format_jet_csv(h);
                return o;
            };
        });
    }
    double rho_f = 1, rho_g = 1, c_f = 0, c_g = 0;
    {
        auto* c = sub("jet-bound", "check the composition bound");
        c->add_option("--f", jet_f, "outer jet")->required();
        c->add_option("--g", jet_g, "inner jet (g_0 = 0)")->required();
        c->add_option("--m", seq_m, "weight of f")->required();
        c->add_option("--l", seq_l, "weight of g")->required();
        c->add_option("--order", comp_order, "truncation for generated jets");
        c->add_flag("--zero-constant", zero_constant, "set g_0 = 0");
        c->add_option("--rho-f", rho_f, "rho of f");
        c->add_option("--rho-g", rho_g, "rho of g");
        auto* cfo = c->add_option("--c-f", c_f, "constant of f (default: certified minimum)");
        auto* cgo = c->add_option("--c-g", c_g, "constant of g (default: certified minimum)");
        c->callback([&, cfo, cgo] {
            action = [&, cfo, cgo] {
                const auto [f, g] = load_fg();
                const auto m = parse_sequence_spec(seq_m), l = parse_sequence_spec(seq_l);
                if (!(rho_f > 0) || !(rho_g > 0))
                    throw UsageError("--rho-f and --rho-g must be positive");
                const double cf = cfo->count() ? c_f : jet_norm_rho(f, m, rho_f).linear();
                const double cg = cgo->count() ? c_g : jet_norm_rho(g, l, rho_g).linear();
                const auto rep = verify_composition_bound(f, g, m, l, rho_f, cf, rho_g, cg);
                Outcome o;
                o.doc = envelope("jet-bound",
                                 {{"f", jet_f}, {"g", jet_g}, {"m", seq_m}, {"l", seq_l}, {"order", comp_order},
                                  {"rho_f", rho_f}, {"C_f", json_number(cf)}, {"rho_g", rho_g},
                                  {"C_g", json_number(cg)}},
                                 cfg, rep.to_json());
                o.code = exit_code(rep.verdict.status);
                return o;
            };
        });
    }
    // radius-test
    std::string r_spec, direction = "infinite";
    double delta = 1.0;
    {
        auto* c = sub("radius-test", "boundedness of |a_k| r_k delta^k");
        c->add_option("--jet", jet_spec, "coefficients a_k")->required();
        c->add_option("--r", r_spec, "test sequence r_k (sequence spec)")->required();
        c->add_option("--delta", delta, "delta > 0");
        c->add_option("--order", order, "truncation");
        c->add_option("--direction", direction, "infinite or positive")
            ->check(CLI::IsMember({"infinite", "positive"}));
        c->callback([&] {
            action = [&] {
                const auto a = parse_jet_spec(jet_spec, order);
                const auto r = TestSequence::from_sequence(parse_sequence_spec(r_spec), a.order(), cfg);
                const auto rep = radius_test(a, r, delta,
                                             direction == "infinite" ? RadiusDirection::Infinite
                                                                     : RadiusDirection::Positive,
                                             cfg);
                Json j = rep.to_json();
                Outcome o;
                o.doc = envelope("radius-test",
                                 {{"jet", jet_spec}, {"r", r_spec}, {"delta", delta}, {"order", a.order()},
                                  {"direction", direction}, {"r_submultiplicative", r.submultiplicative},
                                  {"r_decay", to_string(r.decay)}},
                                 cfg, j);
                o.code = exit_code(rep.bounded.status);
                return o;
            };
        });
    }
    // norms / whitney
    std::string expr_text;
    std::vector<std::string> grid_text;
    std::optional<double> at_y;
    double rho = 1.0;
    std::size_t n_order = kDefaultOrder;
    std::string r_weight;
    auto function_options = [&](CLI::App* c) {
        c->add_option("--expr", expr_text, "expression in x (and y)")->required();
        c->add_option("--grid", grid_text, "axis a,b,n (once for 1-D, twice for 2-D)");
        c->add_option("--at-y", at_y, "restrict to the slice y = value");
        c->add_option("--order", n_order, "derivative order N");
        c->add_option("--rho", rho, "rho > 0");
        c->add_option("--seq", seq, "sequence M");
    };
    auto function_params = [&](const Grid& g) {
        Json axes = Json::array();
        for (const auto& a : g.axes)
            axes.push_back(Json::array({a.a, a.b, a.n}));
        Json p{{"expr", expr_text}, {"grid", axes}, {"order", n_order}, {"rho", rho}, {"seq", seq}};
        if (at_y)
            p["at_y"] = *at_y;
        return p;
    };
    {
        auto* c = sub("norms", "seminorms of a concrete function");
        function_options(c);
        c->add_option("--r", r_weight, "general weight r_k (sequence spec)");
        c->callback([&] {
            action = [&] {
                const Grid grid = parse_grid(grid_text.empty() ? std::vector<std::string>{kDefaultGrid} : grid_text);
                const Expr e = parse_function(expr_text, at_y, grid.dim());
                const auto m = parse_sequence_spec(seq);
                const auto sj = sample_jet(e, grid, n_order);
                const auto semi = seminorm_K_rho(sj, m, rho, n_order);
                const auto brackets = derivative_sup_norms(sj);
                Json rep;
                rep["seminorm_K_rho"] = semi.to_json();
                Json br = Json::array();
                for (std::size_t k = 0; k < brackets.size(); ++k)
                    br.push_back({{"m", k}, {"lower", json_number(brackets[k].lower)},
                                  {"upper", json_number(brackets[k].upper)}});
                rep["derivative_sup_norms"] = br;
                Outcome o;
                std::ostringstream csv;
                csv << "n,k,kind,value\n";
                for (std::size_t k = 0; k < brackets.size(); ++k)
                    csv << k << ",,sup_norm," << format_double(brackets[k].lower) << '\n';
                const bool whitney_ok = sj.grid.size() >= 2 && (grid.dim() == 1 || grid.size() <= kMaxWhitneyPoints2D);
                if (whitney_ok && n_order >= 1) {
                    const auto table = whitney_table(sj, n_order);
                    Json tj = Json::array();
                    for (std::size_t n = 0; n < n_order; ++n)
                        for (std::size_t k = 0; n + k + 1 <= n_order; ++k) {
                            const auto& v = table.at(n, k);
                            tj.push_back({{"n", n}, {"k", k}, {"value", json_number(v.value)}, {"x_index", v.x_index},
                                          {"y_index", v.y_index}});
                            csv << n << ',' << k << ",remainder," << format_double(v.value) << '\n';
                        }
                    rep["remainder_seminorms"] = tj;
                    rep["lower_bound_only"] = table.lower_bound_only;
                    rep["norm_rho"] = json_number(norm_rho(sj, m, rho, n_order));
                    if (!r_weight.empty())
                        rep["general_weight_norm"] =
                            json_number(general_weight_norm(sj, m, parse_sequence_spec(r_weight), n_order));
                } else {
                    rep["norm_rho"] = nullptr;
                    rep["note"] = "remainder seminorms skipped: need >= 2 points (<= 256 in 2-D)";
                }
                Json params = function_params(grid);
                if (!r_weight.empty())
                    params["r"] = r_weight;
                o.doc = envelope("norms", params, cfg, rep);
                o.csv = csv.str();
                return o;
            };
        });
    }
    {
        auto* c = sub("whitney", "Taylor remainder inequality on a grid");
        function_options(c);
        c->callback([&] {
            action = [&] {
                const Grid grid = parse_grid(grid_text.empty() ? std::vector<std::string>{kDefaultGrid} : grid_text);
                const Expr e = parse_function(expr_text, at_y, grid.dim());
                const auto m = parse_sequence_spec(seq);
                const auto rep = verify_taylor_remainder_bound(sample_jet(e, grid, n_order), m, rho, n_order);
                Outcome o;
                o.doc = envelope("whitney", function_params(grid), cfg, rep.to_json());
                o.csv = rep.csv();
                o.code = exit_code(rep.verdict.status);
                return o;
            };
        });
    }
    // explaw
    std::string grid1 = kDefaultGrid, grid2 = kDefaultGrid;
    double sigma = 0, rho1 = 1, rho2 = 1;
    {
        auto* c = sub("explaw", "inequality chain of the exponential law");
        c->add_option("--expr", expr_text, "expression in x and y")->required();
        c->add_option("--grid1", grid1, "axis of x");
        c->add_option("--grid2", grid2, "axis of y");
        c->add_option("--seq", seq, "sequence M");
        auto* so = c->add_option("--sigma", sigma, "moderate growth constant (default: estimated)");
        c->add_option("--rho1", rho1, "rho1 > 0");
        c->add_option("--rho2", rho2, "rho2 > 0");
        c->add_option("--order", n_order, "derivative order N");
        c->callback([&, so] {
            action = [&, so] {
                const auto m = parse_sequence_spec(seq);
                const Axis a1 = parse_axis(grid1), a2 = parse_axis(grid2);
                const Expr e = parse_expr(expr_text);
                double s = sigma;
                if (!so->count())
                    s = n_order >= 2 ? std::max(1.0, moderate_growth_sup(m, n_order, cfg).sup) : 1.0;
                const auto rep = explaw_verify(e, a1, a2, m, s, rho1, rho2, n_order);
                Outcome o;
                o.doc = envelope("explaw",
                                 {{"expr", expr_text}, {"grid1", grid1}, {"grid2", grid2}, {"seq", seq}, {"sigma", s},
                                  {"sigma_estimated", so->count() == 0}, {"rho1", rho1}, {"rho2", rho2},
                                  {"order", n_order}},
                                 cfg, rep.to_json());
                o.code = exit_code(rep.verdict.status);
                return o;
            };
        });
    }
    // counterexample54
    double q = 2.0;
    std::size_t n_max = 8;
    {
        auto* c = sub("counterexample54", "divergence table for M_k = q^(k^2)");
        c->add_option("--q", q, "q > 1");
        c->add_option("--nmax", n_max, "number of rows");
        c->add_option("--rho1", rho1, "rho1 > 0");
        c->callback([&] {
            action = [&] {
                const auto rep = counterexample_54(q, n_max, rho1);
                Outcome o;
                o.doc = envelope("counterexample54", {{"q", q}, {"nmax", n_max}, {"rho1", rho1}}, cfg, rep.to_json());
                o.csv = rep.csv();
                o.code = exit_code(rep.verdict.status);
                return o;
            };
        });
    }
    // cookbook
    std::string section, bundle_dir;
    {
        auto* c = sub("cookbook", "canned reproduction runs");
        c->add_option("section", section, "thm2.2, thm2.4, lemma2.5, sec3.1, sec5.2 or sec5.4")->required();
        c->add_option("--out", bundle_dir, "bundle directory (default cookbook-<section>)");
        c->callback([&] {
            action = [&] {
                const auto res = run_section(section);
                const std::filesystem::path dir = bundle_dir.empty() ? "cookbook-" + section : bundle_dir;
                std::filesystem::create_directories(dir);
                write_file(dir / "inputs.json", dump_json(res.inputs));
                write_file(dir / "report.json", dump_json(res.report));
                std::string summary = std::string(res.pass ? "PASS" : "FAIL") + " " + section + "\n";
                for (const auto& line : res.checks)
                    summary += line + "\n";
                write_file(dir / "summary.txt", summary);
                Json rep;
                rep["section"] = section;
                rep["pass"] = res.pass;
                rep["checks"] = res.checks;
                rep["bundle"] = dir.string();
                rep["files"] = {"inputs.json", "report.json", "summary.txt"};
                Outcome o;
                o.doc = envelope("cookbook", {{"section", section}, {"out", dir.string()}}, cfg, rep);
                o.code = res.pass ? 0 : 1;
                return o;
            };
        });
    }

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }
    if (!action) {
        err << "usage error: no subcommand\n";
        return kExitUsage;
    }

    try {
        Outcome o = action();
        std::string text;
        if (format == "json") {
            text = dump_json(o.doc);
        } else if (format == "human") {
            text = render_human(o.doc);
        } else if (format == "csv") {
            if (o.csv.empty())
                throw UsageError("csv output is not available for this command");
            text = o.csv;
        } else {
            if (o.seq.empty())
                throw UsageError("seq output is not available for this command");
            text = o.seq;
        }
        if (output.empty()) {
            out << text;
        } else {
            write_file(output, text);
        }
        return o.code;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "numeric error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const DegenerateFit& e) {
        err << "numeric error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const InsufficientData& e) {
        err << "numeric error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const Error& e) {
        // precondition and parameter errors of the library: the input is unusable
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitNumeric;
    }
}

} // namespace dckit::cli
