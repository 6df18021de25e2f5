#include "dckit/jetnorms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "dckit/analysis.hpp"
#include "dckit/decimal.hpp"
#include "dckit/error.hpp"
#include "dckit/parallel.hpp"
#include "dckit/taylor.hpp"

namespace dckit {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kTaylorBoundTol = 1e-6;

std::vector<std::vector<double>> pascal(std::size_t n) {
    std::vector<std::vector<double>> c(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        c[i].assign(i + 1, 1.0);
        for (std::size_t j = 1; j < i; ++j)
            c[i][j] = c[i - 1][j - 1] + c[i - 1][j];
    }
    return c;
}

double safe_log(double v) { return v > 0 ? std::log(v) : kNegInf; }

std::vector<double> powers(double base, std::size_t n) {
    std::vector<double> p(n + 1, 1.0);
    for (std::size_t i = 1; i <= n; ++i)
        p[i] = p[i - 1] * base;
    return p;
}

struct Direction {
    double c, s;
};

std::vector<Direction> directions(std::size_t d) {
    std::vector<Direction> out(d);
    for (std::size_t i = 0; i < d; ++i) {
        const double th = std::numbers::pi * static_cast<double>(i) / static_cast<double>(d);
        out[i] = {std::cos(th), std::sin(th)};
    }
    return out;
}

/// f^(m)(p)(v^m) from mixed partials T with the given stride.
double diagonal(const double* t, std::size_t stride, const std::vector<std::vector<double>>& c, const Direction& v,
                std::size_t m) {
    const auto p1 = powers(v.c, m), p2 = powers(v.s, m);
    double s = 0.0;
    for (std::size_t a = 0; a <= m; ++a)
        s += c[m][a] * p1[a] * p2[m - a] * t[a * stride + (m - a)];
    return s;
}

/// J[a'] = sum_b' C(l, b') u1^b' u2^(l - b') I[a' + b'] for a' = 0..k, I indexed by the first
/// partial order within total order k + l.
std::vector<double> contract_u(const std::vector<double>& in, const std::vector<std::vector<double>>& c,
                               double u1, double u2, std::size_t k, std::size_t l) {
    const auto p1 = powers(u1, l), p2 = powers(u2, l);
    std::vector<double> j(k + 1, 0.0);
    for (std::size_t a = 0; a <= k; ++a) {
        double s = 0.0;
        for (std::size_t b = 0; b <= l; ++b)
            s += c[l][b] * p1[b] * p2[l - b] * in[a + b];
        j[a] = s;
    }
    return j;
}

double max_over_directions(const std::vector<double>& j, const std::vector<std::vector<double>>& c,
                           const std::vector<Direction>& dirs, std::size_t k) {
    if (k == 0)
        return std::fabs(j[0]);
    double best = 0.0;
    for (const auto& v : dirs) {
        const auto p1 = powers(v.c, k), p2 = powers(v.s, k);
        double s = 0.0;
        for (std::size_t a = 0; a <= k; ++a)
            s += c[k][a] * p1[a] * p2[k - a] * j[a];
        best = std::max(best, std::fabs(s));
    }
    return best;
}

double sampling_factor(std::size_t m, std::size_t d) {
    return 1.0 / (1.0 - static_cast<double>(m) * std::numbers::pi / (2.0 * static_cast<double>(d)));
}

void check_grid(const Grid& g) {
    if (g.dim() != 1 && g.dim() != 2)
        throw InvalidParameter("grid must be 1- or 2-dimensional");
    for (const auto& ax : g.axes) {
        if (ax.n < 1 || ax.n > kMaxAxisPoints)
            throw InvalidParameter("axis point count must be in [1, " + std::to_string(kMaxAxisPoints) + "]");
        if (!std::isfinite(ax.a) || !std::isfinite(ax.b) || ax.b < ax.a)
            throw InvalidParameter("axis needs finite a <= b");
    }
}

/// Golden-section search for the max of h on [lo, hi].
template <class F>
double golden_max(F h, double lo, double hi, int iterations = 60) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - r * (b - a), d = a + r * (b - a);
    double hc = h(c), hd = h(d);
    double best = std::max(hc, hd);
    for (int i = 0; i < iterations && b - a > 1e-15 * std::max(1.0, std::fabs(a)); ++i) {
        if (hc >= hd) {
            b = d;
            d = c;
            hd = hc;
            c = b - r * (b - a);
            hc = h(c);
            best = std::max(best, hc);
        } else {
            a = c;
            c = d;
            hc = hd;
            d = a + r * (b - a);
            hd = h(d);
            best = std::max(best, hd);
        }
    }
    return best;
}

struct TableAcc {
    std::vector<std::vector<WhitneyValue>> e;

    explicit TableAcc(std::size_t order) : e(order) {
        for (std::size_t n = 0; n < order; ++n)
            e[n].resize(order - n);
    }
    void offer(std::size_t n, std::size_t k, double v, std::size_t x, std::size_t y) {
        auto& slot = e[n][k];
        if (v > slot.value)
            slot = {v, x, y};
    }
    void merge(const TableAcc& o) {
        for (std::size_t n = 0; n < e.size(); ++n)
            for (std::size_t k = 0; k < e[n].size(); ++k)
                if (o.e[n][k].value > e[n][k].value)
                    e[n][k] = o.e[n][k];
    }
};

/// Common part of general_weight_norm and norm_rho; r given by its logs.
double weight_norm(const SampledJet& sj, const WeightSequence& m, const std::vector<double>& log_r, std::size_t order) {
    if (sj.order < order)
        throw OrderInsufficient("sampled jet has order " + std::to_string(sj.order) + ", need " +
                                std::to_string(order));
    const auto lm = m.logs(order);
    const auto norms = derivative_sup_norms(sj);
    double best = kNegInf;
    for (std::size_t k = 0; k <= order; ++k)
        best = std::max(best, safe_log(norms[k].lower) - log_factorial(k) - log_r[k] - lm[k]);
    if (order >= 1) {
        const auto table = whitney_table(sj, order);
        for (std::size_t n = 0; n < order; ++n)
            for (std::size_t k = 0; n + k + 1 <= order; ++k) {
                const std::size_t s = n + k + 1;
                best = std::max(best, safe_log(table.at(n, k).value) - log_factorial(s) - log_r[s] - lm[s]);
            }
    }
    return best == kNegInf ? 0.0 : std::exp(best);
}

} // namespace

std::vector<double> Axis::points() const {
    std::vector<double> p(n);
    if (n == 1) {
        p[0] = a;
        return p;
    }
    for (std::size_t i = 0; i < n; ++i)
        p[i] = a + static_cast<double>(i) * (b - a) / static_cast<double>(n - 1);
    p[n - 1] = b;
    return p;
}

Axis parse_axis(const std::string& text) {
    std::size_t pos = 0;
    auto number = [&](const char* what) {
        const std::size_t at = pos;
        const auto tok = scan_decimal(text, pos);
        if (!tok)
            throw ParseError(at, what);
        if (tok->zero)
            return 0.0;
        if (!tok->value)
            throw ParseError(at, std::string(what) + " within binary64 range");
        return *tok->value;
    };
    auto comma = [&] {
        if (pos >= text.size() || text[pos] != ',')
            throw ParseError(pos, "','");
        ++pos;
    };
    Axis ax;
    ax.a = number("axis start");
    comma();
    ax.b = number("axis end");
    comma();
    const std::size_t at = pos;
    std::size_t n = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
        n = n * 10 + static_cast<std::size_t>(text[pos] - '0');
        if (n > 1000000)
            throw ParseError(at, "point count");
        ++pos;
    }
    if (pos == at)
        throw ParseError(at, "point count");
    if (pos != text.size())
        throw ParseError(pos, "end of axis");
    ax.n = n;
    if (n < 1 || n > kMaxAxisPoints)
        throw InvalidParameter("axis point count must be in [1, " + std::to_string(kMaxAxisPoints) + "]");
    if (ax.b < ax.a)
        throw InvalidParameter("axis needs a <= b");
    return ax;
}

std::size_t Grid::size() const noexcept {
    std::size_t s = axes.empty() ? 0 : 1;
    for (const auto& a : axes)
        s *= a.n;
    return s;
}

std::array<double, 2> Grid::point(std::size_t i) const {
    auto coord = [](const Axis& ax, std::size_t j) {
        if (ax.n == 1)
            return ax.a;
        if (j + 1 == ax.n)
            return ax.b;
        return ax.a + static_cast<double>(j) * (ax.b - ax.a) / static_cast<double>(ax.n - 1);
    };
    if (dim() == 1)
        return {coord(axes[0], i), 0.0};
    return {coord(axes[0], i / axes[1].n), coord(axes[1], i % axes[1].n)};
}

SampledJet sample_jet(const Expr& e, const Grid& grid, std::size_t order) {
    check_grid(grid);
    if (order > kMaxTaylorOrder)
        throw OrderTooLarge("order " + std::to_string(order) + " exceeds " + std::to_string(kMaxTaylorOrder));
    SampledJet sj;
    sj.grid = grid;
    sj.order = order;
    sj.source = e;
    sj.derivs.resize(grid.size());
    parallel_for(grid.size(), [&](std::size_t p) {
        const auto pt = grid.point(p);
        sj.derivs[p] = grid.dim() == 1 ? taylor_jet(e, pt[0], order) : mixed_partials(e, pt[0], pt[1], order);
    });
    return sj;
}

SampledJet sampled_jet_from_data(const Axis& axis, std::vector<std::vector<double>> derivs) {
    check_grid(Grid::line(axis));
    if (derivs.size() != axis.n)
        throw InvalidParameter("one derivative list per grid point required");
    if (derivs.empty() || derivs[0].empty())
        throw InvalidParameter("empty derivative data");
    const std::size_t len = derivs[0].size();
    for (const auto& d : derivs)
        if (d.size() != len)
            throw InvalidParameter("derivative lists differ in length");
    SampledJet sj;
    sj.grid = Grid::line(axis);
    sj.order = len - 1;
    sj.derivs = std::move(derivs);
    return sj;
}

std::size_t direction_count(std::size_t order) noexcept { return std::max<std::size_t>(32, 4 * order); }

std::pair<double, double> polarization_bracket(double diag_sup, std::size_t k) {
    if (!(diag_sup >= 0))
        throw InvalidParameter("diagonal sup must be nonnegative");
    if (diag_sup == 0)
        return {0.0, 0.0};
    return {diag_sup, std::exp(static_cast<double>(k) * std::log(2.0 * std::numbers::e) + std::log(diag_sup))};
}

std::vector<Bracket> derivative_sup_norms(const SampledJet& sj) {
    const std::size_t big_n = sj.order;
    const std::size_t g = sj.grid.size();
    std::vector<Bracket> out(big_n + 1);
    if (sj.grid.dim() == 1) {
        const auto xs = sj.grid.axes[0].points();
        parallel_for(big_n + 1, [&](std::size_t m) {
            double best = 0.0;
            std::vector<std::pair<double, std::size_t>> peaks;
            for (std::size_t p = 0; p < g; ++p) {
                const double v = std::fabs(sj.derivs[p][m]);
                best = std::max(best, v);
                const bool left = p == 0 || v >= std::fabs(sj.derivs[p - 1][m]);
                const bool right = p + 1 == g || v >= std::fabs(sj.derivs[p + 1][m]);
                if (left && right)
                    peaks.emplace_back(v, p);
            }
            if (sj.source && g >= 2) {
                std::stable_sort(peaks.begin(), peaks.end(),
                                 [](const auto& a, const auto& b) { return a.first > b.first; });
                if (peaks.size() > 16)
                    peaks.resize(16);
                const Expr& e = *sj.source;
                auto h = [&](double x) { return std::fabs(taylor_jet(e, x, m)[m]); };
                for (const auto& [v, p] : peaks) {
                    const double lo = xs[p == 0 ? 0 : p - 1], hi = xs[p + 1 == g ? g - 1 : p + 1];
                    best = std::max(best, golden_max(h, lo, hi));
                }
            }
            out[m] = {best, best};
        });
        return out;
    }
    const std::size_t d = direction_count(big_n);
    const auto dirs = directions(d);
    const auto c = pascal(big_n);
    std::vector<std::vector<double>> per_point(g, std::vector<double>(big_n + 1, 0.0));
    parallel_for(g, [&](std::size_t p) {
        for (std::size_t m = 0; m <= big_n; ++m) {
            double best = 0.0;
            for (const auto& v : dirs)
                best = std::max(best, std::fabs(diagonal(sj.derivs[p].data(), big_n + 1, c, v, m)));
            per_point[p][m] = best;
        }
    });
    for (std::size_t m = 0; m <= big_n; ++m) {
        double best = 0.0;
        for (std::size_t p = 0; p < g; ++p)
            best = std::max(best, per_point[p][m]);
        out[m] = {best, polarization_bracket(best, m).second * sampling_factor(m, d)};
    }
    return out;
}

Json SeminormResult::to_json() const {
    Json j;
    j["lower"] = json_number(lower);
    j["upper"] = json_number(upper);
    j["n_at"] = n_at;
    j["point_at"] = point_at;
    j["per_order"] = json_numbers(per_order);
    return j;
}

SeminormResult seminorm_K_rho(const SampledJet& sj, const WeightSequence& m, double rho, std::size_t order) {
    if (!(rho > 0) || !std::isfinite(rho))
        throw InvalidParameter("rho must be positive");
    if (sj.order < order)
        throw OrderInsufficient("sampled jet has order " + std::to_string(sj.order) + ", need " +
                                std::to_string(order));
    const auto lm = m.logs(order);
    const double lr = std::log(rho);
    std::vector<double> lw(order + 1);
    for (std::size_t n = 0; n <= order; ++n)
        lw[n] = log_factorial(n) + static_cast<double>(n) * lr + lm[n];
    const std::size_t g = sj.grid.size();
    const bool two = sj.grid.dim() == 2;
    const std::size_t d = direction_count(order);
    const auto dirs = directions(d);
    const auto c = pascal(order);
    std::vector<std::vector<double>> vals(g, std::vector<double>(order + 1, 0.0));
    parallel_for(g, [&](std::size_t p) {
        for (std::size_t n = 0; n <= order; ++n) {
            double v = 0.0;
            if (!two) {
                v = std::fabs(sj.derivs[p][n]);
            } else {
                for (const auto& dir : dirs)
                    v = std::max(v, std::fabs(diagonal(sj.derivs[p].data(), sj.order + 1, c, dir, n)));
            }
            vals[p][n] = v;
        }
    });
    SeminormResult r;
    r.per_order.assign(order + 1, 0.0);
    double best = kNegInf, best_up = kNegInf;
    for (std::size_t p = 0; p < g; ++p)
        for (std::size_t n = 0; n <= order; ++n) {
            const double l = safe_log(vals[p][n]) - lw[n];
            if (l > best) {
                best = l;
                r.n_at = n;
                r.point_at = p;
            }
            if (l != kNegInf)
                r.per_order[n] = std::max(r.per_order[n], std::exp(l));
            double up = l;
            if (two && l != kNegInf)
                up = l + static_cast<double>(n) * std::log(2.0 * std::numbers::e) + std::log(sampling_factor(n, d));
            best_up = std::max(best_up, up);
        }
    r.lower = best == kNegInf ? 0.0 : std::exp(best);
    r.upper = best_up == kNegInf ? 0.0 : std::exp(best_up);
    return r;
}

SeminormResult seminorm_K_rho(const Expr& e, const Grid& grid, const WeightSequence& m, double rho,
                              std::size_t order) {
    return seminorm_K_rho(sample_jet(e, grid, order), m, rho, order);
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(std::size_t n) {
    if (n < 1)
        throw InvalidParameter("Gauss-Legendre needs at least one node");
    if (n == 1)
        return {{0.5}, {1.0}};
    std::vector<double> x(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
        double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (std::size_t k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * static_cast<double>(k) - 1.0) * z * p1 - (static_cast<double>(k) - 1.0) * p0) /
                                  static_cast<double>(k);
                p0 = p1;
                p1 = p2;
            }
            dp = static_cast<double>(n) * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::fabs(dz) < 1e-16)
                break;
        }
        // map [-1, 1] to [0, 1], ascending
        x[n - 1 - i] = (1.0 + z) / 2.0;
        w[n - 1 - i] = 1.0 / ((1.0 - z * z) * dp * dp);
    }
    return {x, w};
}

WhitneyTable whitney_table(const SampledJet& sj, std::size_t order) {
    if (order < 1)
        throw InvalidParameter("remainder table needs order >= 1");
    if (sj.order + 1 < order)
        throw OrderInsufficient("sampled jet has order " + std::to_string(sj.order) + ", remainder table needs " +
                                std::to_string(order - 1));
    const std::size_t g = sj.grid.size();
    if (g < 2)
        throw InvalidParameter("remainder seminorms need at least 2 grid points");
    const bool two = sj.grid.dim() == 2;
    if (two && g > kMaxWhitneyPoints2D)
        throw InvalidParameter("2-D remainder scan limited to " + std::to_string(kMaxWhitneyPoints2D) +
                               " grid points");
    WhitneyTable out;
    out.order = order;
    out.lower_bound_only = two;
    out.integral_form = sj.source.has_value();
    std::vector<TableAcc> rows(g, TableAcc(order));

    if (!two) {
        const auto xs = sj.grid.axes[0].points();
        if (sj.source) {
            const auto [t, w] = gauss_legendre(32);
            const std::size_t q = t.size();
            std::vector<std::vector<double>> pf(order, std::vector<double>(q)), pb(order, std::vector<double>(q));
            for (std::size_t n = 0; n < order; ++n)
                for (std::size_t i = 0; i < q; ++i) {
                    pf[n][i] = w[i] * std::pow(1.0 - t[i], static_cast<double>(n));
                    pb[n][i] = w[i] * std::pow(t[i], static_cast<double>(n));
                }
            const Expr& e = *sj.source;
            parallel_for(g, [&](std::size_t p) {
                std::vector<std::vector<double>> jets(q);
                for (std::size_t r = p + 1; r < g; ++r) {
                    if (xs[r] == xs[p])
                        continue;
                    for (std::size_t i = 0; i < q; ++i)
                        jets[i] = taylor_jet(e, xs[p] + t[i] * (xs[r] - xs[p]), order);
                    for (std::size_t n = 0; n < order; ++n)
                        for (std::size_t k = 0; n + k + 1 <= order; ++k) {
                            const std::size_t m = n + k + 1;
                            double fwd = 0.0, bwd = 0.0;
                            for (std::size_t i = 0; i < q; ++i) {
                                fwd += pf[n][i] * jets[i][m];
                                bwd += pb[n][i] * jets[i][m];
                            }
                            const double f = static_cast<double>(n + 1);
                            rows[p].offer(n, k, f * std::fabs(fwd), r, p);
                            rows[p].offer(n, k, f * std::fabs(bwd), p, r);
                        }
                }
            });
        } else {
            parallel_for(g, [&](std::size_t p) {
                for (std::size_t r = 0; r < g; ++r) {
                    if (xs[r] == xs[p])
                        continue;
                    const long double u = static_cast<long double>(xs[p]) - xs[r];
                    for (std::size_t k = 0; k < order; ++k) {
                        long double taylor = 0.0L, upow = 1.0L;
                        for (std::size_t n = 0; n + k + 1 <= order; ++n) {
                            if (n > 0)
                                upow *= u / static_cast<long double>(n);
                            taylor += static_cast<long double>(sj.derivs[r][k + n]) * upow;
                            const long double rem = static_cast<long double>(sj.derivs[p][k]) - taylor;
                            // (n+1)! |rem| / |u|^(n+1) = (n+1) |rem| / (|u| * |upow|) with upow = u^n / n!
                            const long double val = static_cast<long double>(n + 1) * std::fabs(rem) /
                                                    (std::fabs(u) * std::fabs(upow));
                            rows[p].offer(n, k, static_cast<double>(val), p, r);
                        }
                    }
                }
            });
        }
    } else {
        const std::size_t d = direction_count(order);
        const auto dirs = directions(d);
        const auto c = pascal(order);
        if (sj.source) {
            const auto [t, w] = gauss_legendre(16);
            const std::size_t q = t.size();
            const Expr& e = *sj.source;
            parallel_for(g, [&](std::size_t p) {
                const auto pp = sj.grid.point(p);
                std::vector<std::vector<double>> tens(q);
                std::vector<double> ifwd, ibwd;
                for (std::size_t r = p + 1; r < g; ++r) {
                    const auto pr = sj.grid.point(r);
                    const double dx = pr[0] - pp[0], dy = pr[1] - pp[1];
                    const double len = std::hypot(dx, dy);
                    if (len == 0)
                        continue;
                    for (std::size_t i = 0; i < q; ++i)
                        tens[i] = mixed_partials(e, pp[0] + t[i] * dx, pp[1] + t[i] * dy, order);
                    for (std::size_t n = 0; n < order; ++n)
                        for (std::size_t k = 0; n + k + 1 <= order; ++k) {
                            const std::size_t m = n + k + 1;
                            ifwd.assign(m + 1, 0.0);
                            ibwd.assign(m + 1, 0.0);
                            for (std::size_t i = 0; i < q; ++i) {
                                const double wf = w[i] * std::pow(1.0 - t[i], static_cast<double>(n));
                                const double wb = w[i] * std::pow(t[i], static_cast<double>(n));
                                for (std::size_t a = 0; a <= m; ++a) {
                                    const double v = tens[i][a * (order + 1) + (m - a)];
                                    ifwd[a] += wf * v;
                                    ibwd[a] += wb * v;
                                }
                            }
                            const double f = static_cast<double>(n + 1);
                            // x = r, y = p: u = (r - p)/|r - p|; reverse pair uses -u and the
                            // sign of an odd power does not change the absolute value
                            const auto jf = contract_u(ifwd, c, dx / len, dy / len, k, n + 1);
                            const auto jb = contract_u(ibwd, c, dx / len, dy / len, k, n + 1);
                            rows[p].offer(n, k, f * max_over_directions(jf, c, dirs, k), r, p);
                            rows[p].offer(n, k, f * max_over_directions(jb, c, dirs, k), p, r);
                        }
                }
            });
        } else {
            parallel_for(g, [&](std::size_t p) {
                const auto pp = sj.grid.point(p);
                const std::size_t stride = sj.order + 1;
                std::vector<double> slice;
                for (std::size_t r = 0; r < g; ++r) {
                    const auto pr = sj.grid.point(r);
                    const double dx = pp[0] - pr[0], dy = pp[1] - pr[1];
                    const double len = std::hypot(dx, dy);
                    if (len == 0)
                        continue;
                    for (std::size_t k = 0; k < order; ++k) {
                        // remainder tensor for k slots: f^(k)(x) - sum_j f^(k+j)(y)(., u^j)/j!
                        std::vector<double> rem(k + 1);
                        for (std::size_t a = 0; a <= k; ++a)
                            rem[a] = sj.derivs[p][a * stride + (k - a)];
                        double ufac = 1.0;
                        for (std::size_t n = 0; n + k + 1 <= order; ++n) {
                            if (n > 0)
                                ufac *= len / static_cast<double>(n);
                            slice.assign(k + n + 1, 0.0);
                            for (std::size_t a = 0; a <= k + n; ++a)
                                slice[a] = sj.derivs[r][a * stride + (k + n - a)];
                            const auto jn = contract_u(slice, c, dx / len, dy / len, k, n);
                            for (std::size_t a = 0; a <= k; ++a)
                                rem[a] -= ufac * jn[a];
                            const double val = static_cast<double>(n + 1) * max_over_directions(rem, c, dirs, k) /
                                               (len * ufac);
                            rows[p].offer(n, k, val, p, r);
                        }
                    }
                }
            });
        }
    }
    TableAcc acc(order);
    for (const auto& r : rows)
        acc.merge(r);
    out.entries = std::move(acc.e);
    return out;
}

WhitneyValue whitney_remainder_seminorm(const SampledJet& sj, std::size_t n, std::size_t k) {
    if (sj.order < n + k)
        throw OrderInsufficient("sampled jet has order " + std::to_string(sj.order) + ", need " +
                                std::to_string(n + k));
    return whitney_table(sj, n + k + 1).at(n, k);
}

Json TaylorBoundReport::to_json() const {
    Json j;
    j["verdict"] = dckit::to_json(verdict);
    j["violations"] = violations;
    j["max_ratio"] = json_number(max_ratio);
    Json es = Json::array();
    for (const auto& e : entries) {
        Json r;
        r["n"] = e.n;
        r["k"] = e.k;
        r["lhs"] = json_number(e.lhs);
        r["rhs"] = json_number(e.rhs);
        r["weighted_lhs"] = json_number(e.weighted_lhs);
        r["weighted_rhs"] = json_number(e.weighted_rhs);
        es.push_back(r);
    }
    j["entries"] = es;
    return j;
}

std::string TaylorBoundReport::csv() const {
    std::ostringstream os;
    os << "n,k,lhs,rhs,weighted_lhs,weighted_rhs\n";
    for (const auto& e : entries)
        os << e.n << ',' << e.k << ',' << format_double(e.lhs) << ',' << format_double(e.rhs) << ','
           << format_double(e.weighted_lhs) << ',' << format_double(e.weighted_rhs) << '\n';
    return os.str();
}

TaylorBoundReport verify_taylor_remainder_bound(const SampledJet& sj, const WeightSequence& m, double rho,
                                                std::size_t order) {
    if (!(rho > 0) || !std::isfinite(rho))
        throw InvalidParameter("rho must be positive");
    if (order < 1)
        throw InvalidParameter("order must be >= 1");
    if (sj.order < order)
        throw OrderInsufficient("sampled jet has order " + std::to_string(sj.order) + ", need " +
                                std::to_string(order));
    const auto norms = derivative_sup_norms(sj);
    const auto table = whitney_table(sj, order);
    const auto lm = m.logs(order);
    const double lr = std::log(rho);
    TaylorBoundReport rep;
    auto& v = rep.verdict;
    v.property = "taylor_remainder_bound";
    v.kmax = order;
    double worst = -1.0;
    for (std::size_t n = 0; n < order; ++n)
        for (std::size_t k = 0; n + k + 1 <= order; ++k) {
            const std::size_t s = n + k + 1;
            TaylorBoundEntry e;
            e.n = n;
            e.k = k;
            e.lhs = table.at(n, k).value;
            e.rhs = norms[s].upper;
            const double lw = log_factorial(s) + static_cast<double>(s) * lr + lm[s];
            e.weighted_lhs = e.lhs > 0 ? std::exp(std::log(e.lhs) - lw) : 0.0;
            e.weighted_rhs = e.rhs > 0 ? std::exp(std::log(e.rhs) - lw) : 0.0;
            const double ratio = e.rhs > 0 ? e.lhs / e.rhs : (e.lhs > 0 ? std::numeric_limits<double>::infinity() : 0.0);
            rep.max_ratio = std::max(rep.max_ratio, ratio);
            if (e.lhs > e.rhs * (1.0 + kTaylorBoundTol)) {
                ++rep.violations;
                if (ratio > worst) {
                    worst = ratio;
                    v.witness = {table.at(n, k).x_index, table.at(n, k).y_index};
                    v.params["worst_n"] = n;
                    v.params["worst_k"] = k;
                }
            }
            rep.entries.push_back(e);
        }
    v.status = rep.violations == 0 ? Status::Holds : Status::Fails;
    v.statistic = rep.max_ratio;
    v.params["rho"] = rho;
    v.params["tolerance"] = kTaylorBoundTol;
    v.params["dimension"] = sj.grid.dim();
    v.params["grid_points"] = sj.grid.size();
    v.params["integral_form"] = table.integral_form;
    v.params["sound"] = sj.grid.dim() == 1;
    if (sj.grid.dim() == 2)
        v.note = "2-D: remainders are directional lower bounds, norms polarization upper bounds; not a proof";
    return rep;
}

double general_weight_norm(const SampledJet& sj, const WeightSequence& m, const WeightSequence& r,
                           std::size_t order) {
    return weight_norm(sj, m, r.logs(order), order);
}

double norm_rho(const SampledJet& sj, const WeightSequence& m, double rho, std::size_t order) {
    if (!(rho > 0) || !std::isfinite(rho))
        throw InvalidParameter("rho must be positive");
    return general_weight_norm(sj, m, scale(WeightSequence::constant(), 1.0, rho), order);
}

Json ExplawReport::to_json() const {
    Json j;
    j["verdict"] = dckit::to_json(verdict);
    j["rho"] = json_number(rho);
    j["checked"] = checked;
    j["slack6_min"] = json_number(slack6_min);
    j["slack7_min"] = json_number(slack7_min);
    j["slack9_min"] = json_number(slack9_min);
    j["violations6"] = violations6;
    j["violations7"] = violations7;
    j["violations9"] = violations9;
    j["sup_slack6_min"] = json_number(sup_slack6);
    j["sup_slack7_min"] = json_number(sup_slack7);
    j["sup_slack9_min"] = json_number(sup_slack9);
    return j;
}

ExplawReport explaw_verify(const Expr& e2, const Axis& k1, const Axis& k2, const WeightSequence& m, double sigma,
                           double rho1, double rho2, std::size_t order) {
    if (!(sigma > 0) || !(rho1 > 0) || !(rho2 > 0) || !std::isfinite(sigma) || !std::isfinite(rho1) ||
        !std::isfinite(rho2))
        throw InvalidParameter("sigma, rho1, rho2 must be positive");
    {
        const auto wlc = is_weakly_log_convex(m, std::max<std::size_t>(order, 2));
        if (!wlc.holds())
            throw PreconditionFailed("M is not weakly log-convex (first violation at k = " +
                                     (wlc.witness.empty() ? std::string("?") : std::to_string(wlc.witness[0])) + ")");
        if (order >= 2) {
            const auto mg = moderate_growth_sup(m, order);
            if (mg.sup > sigma * (1.0 + 1e-9))
                throw PreconditionFailed("moderate growth constant " + format_double(mg.sup) + " exceeds sigma = " +
                                         format_double(sigma));
        }
    }
    const auto lm = m.logs(order);
    std::vector<double> w(order + 1);
    for (std::size_t k = 0; k <= order; ++k)
        w[k] = log_factorial(k) + lm[k];
    const double l2s = std::log(2.0 * sigma), lr1 = std::log(rho1), lr2 = std::log(rho2);
    const double lmin = std::min(lr1, lr2);
    ExplawReport rep;
    rep.rho = std::min(rho1, rho2) / (2.0 * sigma);

    // combinatorial slacks, independent of f
    const std::size_t stride = order + 1;
    std::vector<double> s6(stride * stride, 0.0), s7(stride * stride, 0.0), s9(stride * stride, 0.0);
    rep.slack6_min = rep.slack7_min = rep.slack9_min = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a <= order; ++a)
        for (std::size_t b = 0; a + b <= order; ++b) {
            const double k = static_cast<double>(a + b);
            const std::size_t i = a * stride + b;
            s6[i] = k * l2s + w[a] + w[b] - w[a + b];
            s7[i] = static_cast<double>(a) * (lr1 - lmin) + static_cast<double>(b) * (lr2 - lmin);
            s9[i] = w[a + b] - w[a] - w[b];
            rep.slack6_min = std::min(rep.slack6_min, s6[i]);
            rep.slack7_min = std::min(rep.slack7_min, s7[i]);
            rep.slack9_min = std::min(rep.slack9_min, s9[i]);
            rep.violations6 += s6[i] < 0;
            rep.violations7 += s7[i] < 0;
            rep.violations9 += s9[i] < 0;
        }

    // sup-level chain: for each (x1, k1), sups over (x2, k2) of the quotients
    const Grid grid = Grid::box(k1, k2);
    const SampledJet sj = sample_jet(e2, grid, order);
    const std::size_t n1 = k1.n, n2 = k2.n;
    struct Row {
        double s6 = std::numeric_limits<double>::infinity(), s7 = s6, s9 = s6;
    };
    std::vector<Row> rows(n1);
    parallel_for(n1, [&](std::size_t i1) {
        Row row;
        for (std::size_t a = 0; a <= order; ++a) {
            double sa = kNegInf, sb = kNegInf, sc = kNegInf, sd = kNegInf;
            for (std::size_t i2 = 0; i2 < n2; ++i2) {
                const std::size_t p = i1 * n2 + i2;
                for (std::size_t b = 0; a + b <= order; ++b) {
                    const double lv = safe_log(std::fabs(sj.mixed(p, a, b)));
                    if (lv == kNegInf)
                        continue;
                    const std::size_t i = a * stride + b;
                    const double la = lv - w[a] - w[b] - static_cast<double>(a) * lr1 - static_cast<double>(b) * lr2;
                    const double lb = la + s6[i];
                    const double lc = lb + s7[i];
                    const double ld = la - s9[i];
                    sa = std::max(sa, la);
                    sb = std::max(sb, lb);
                    sc = std::max(sc, lc);
                    sd = std::max(sd, ld);
                }
            }
            if (sa == kNegInf)
                continue;
            row.s6 = std::min(row.s6, sb - sa);
            row.s7 = std::min(row.s7, sc - sb);
            row.s9 = std::min(row.s9, sa - sd);
        }
        rows[i1] = row;
    });
    rep.sup_slack6 = rep.sup_slack7 = rep.sup_slack9 = std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
        rep.sup_slack6 = std::min(rep.sup_slack6, r.s6);
        rep.sup_slack7 = std::min(rep.sup_slack7, r.s7);
        rep.sup_slack9 = std::min(rep.sup_slack9, r.s9);
    }
    rep.checked = grid.size() * (order + 1) * (order + 2) / 2;

    auto& v = rep.verdict;
    v.property = "exponential_law_chain";
    v.kmax = order;
    const bool ok = rep.violations6 == 0 && rep.violations7 == 0 && rep.violations9 == 0 && rep.sup_slack6 >= 0 &&
                    rep.sup_slack7 >= 0 && rep.sup_slack9 >= 0;
    v.status = ok ? Status::Holds : Status::Fails;
    v.statistic = std::min({rep.slack6_min, rep.slack7_min, rep.slack9_min});
    v.params["sigma"] = sigma;
    v.params["rho1"] = rho1;
    v.params["rho2"] = rho2;
    v.params["rho"] = rep.rho;
    v.params["grid"] = Json::array({Json::array({k1.a, k1.b, k1.n}), Json::array({k2.a, k2.b, k2.n})});
    v.params["tolerance"] = 0.0;
    return rep;
}

Json CounterexampleReport::to_json() const {
    Json j;
    j["verdict"] = dckit::to_json(verdict);
    j["q"] = q;
    j["rho1"] = rho1;
    j["strictly_increasing"] = strictly_increasing;
    j["log_growth"] = json_number(log_growth);
    Json rs = Json::array();
    for (const auto& r : rows) {
        Json e;
        e["n"] = r.n;
        e["j_n"] = r.n;
        e["k_n"] = r.n;
        e["valid"] = r.valid;
        e["log_term"] = json_number(r.log_term);
        e["term"] = json_number(std::exp(r.log_term));
        e["log_bound"] = json_number(r.log_bound);
        e["bound"] = json_number(std::exp(r.log_bound));
        rs.push_back(e);
    }
    j["rows"] = rs;
    Json cs = Json::array();
    for (std::size_t i = 0; i < c_sums.size(); ++i) {
        Json e;
        e["rho"] = c_sums[i].first;
        e["terms"] = c_sums[i].second.size();
        e["sum"] = json_number(c_sums[i].second.back());
        e["stabilized"] = static_cast<bool>(c_stable[i]);
        cs.push_back(e);
    }
    j["c_rho"] = cs;
    return j;
}

std::string CounterexampleReport::csv() const {
    std::ostringstream os;
    os << "n,valid,log_term,log_bound\n";
    for (const auto& r : rows)
        os << r.n << ',' << (r.valid ? 1 : 0) << ',' << format_double(r.log_term) << ',' << format_double(r.log_bound)
           << '\n';
    return os.str();
}

CounterexampleReport counterexample_54(double q, std::size_t n_max, double rho1) {
    if (!(q > 1) || !std::isfinite(q))
        throw InvalidParameter("q must be > 1");
    if (n_max < 1)
        throw InvalidParameter("n_max must be >= 1");
    if (!(rho1 > 0) || !std::isfinite(rho1))
        throw InvalidParameter("rho1 must be positive");
    const auto m = WeightSequence::qpower(q);
    const auto lm = m.logs(2 * n_max);
    const double lq = std::log(q), lr = std::log(rho1);
    CounterexampleReport rep;
    rep.q = q;
    rep.rho1 = rho1;
    for (std::size_t n = 1; n <= n_max; ++n) {
        const double dn = static_cast<double>(n), ln = std::log(dn);
        CounterexampleRow r;
        r.n = n;
        r.valid = dn * lq >= ln;
        r.log_term = log_factorial(2 * n) + lm[2 * n] - dn * lr - 2.0 * log_factorial(n) - 2.0 * lm[n] - dn * ln;
        r.log_bound = dn * ln - dn * lr;
        rep.rows.push_back(r);
    }
    auto& v = rep.verdict;
    v.property = "counterexample_divergence";
    v.kmax = n_max;
    std::size_t first = 0;
    while (first < rep.rows.size() && !rep.rows[first].valid)
        ++first;
    rep.strictly_increasing = first < rep.rows.size();
    std::optional<std::size_t> bad;
    for (std::size_t i = first; i < rep.rows.size(); ++i) {
        if (i > first && !(rep.rows[i].log_term > rep.rows[i - 1].log_term)) {
            rep.strictly_increasing = false;
            if (!bad)
                bad = rep.rows[i].n;
        }
        if (rep.rows[i].valid && rep.rows[i].log_term < rep.rows[i].log_bound && !bad)
            bad = rep.rows[i].n;
    }
    if (first < rep.rows.size())
        rep.log_growth = rep.rows.back().log_term - rep.rows[first].log_term;

    const std::size_t terms = std::max<std::size_t>(n_max, 64);
    bool stable = true;
    for (double rho : {1.0, 2.0, 4.0}) {
        std::vector<double> partial(terms);
        double s = 0.0;
        for (std::size_t n = 1; n <= terms; ++n) {
            const double dn = static_cast<double>(n);
            s += std::exp(dn * (std::log(rho) - std::log(dn)));
            partial[n - 1] = s;
        }
        const double tail = partial[terms - 1] - partial[3 * terms / 4 - 1];
        const bool st = tail <= 1e-9 * partial[terms - 1];
        stable = stable && st;
        rep.c_sums.emplace_back(rho, std::move(partial));
        rep.c_stable.push_back(st);
    }
    const double need = std::log(1e6);
    const bool growth_ok = n_max < 8 || rep.log_growth >= need;
    v.status = rep.strictly_increasing && !bad && growth_ok && stable ? Status::Holds : Status::Fails;
    if (bad)
        v.witness = {*bad};
    v.statistic = rep.log_growth;
    v.params["q"] = q;
    v.params["rho1"] = rho1;
    v.params["required_log_growth"] = n_max >= 8 ? need : 0.0;
    v.params["c_terms"] = terms;
    return rep;
}

std::vector<double> dilation_divergence_table(const WeightSequence& m, double rho, std::size_t kmax) {
    if (!(rho > 0) || !std::isfinite(rho))
        throw InvalidParameter("rho must be positive");
    const auto lm = m.logs(kmax);
    const double lr = std::log(rho);
    std::vector<double> out(kmax + 1);
    for (std::size_t k = 0; k <= kmax; ++k) {
        const double dk = static_cast<double>(k);
        const double log_f = log_factorial(k) + lm[k];
        out[k] = dk * (std::log(2.0) + lr) + log_f - log_factorial(k) - dk * lr - lm[k];
    }
    return out;
}

FiniteDifferenceCheck finite_difference_check(const Expr& e, double x, double y, double vx, double vy,
                                              std::size_t kmax, double h) {
    if (!(h > 0))
        throw InvalidParameter("step must be positive");
    const auto exact = taylor_jet(e, x, y, vx, vy, kmax);
    auto at = [&](double s) { return taylor_jet(e, x + s * vx, y + s * vy, vx, vy, kmax); };
    const auto p1 = at(h), m1 = at(-h), p2 = at(h / 2), m2 = at(-h / 2);
    FiniteDifferenceCheck out;
    for (std::size_t k = 1; k <= kmax; ++k) {
        const double dh = (p1[k - 1] - m1[k - 1]) / (2.0 * h);
        const double dh2 = (p2[k - 1] - m2[k - 1]) / h;
        const double rich = (4.0 * dh2 - dh) / 3.0;
        const double err = std::fabs(rich - exact[k]) / std::max(std::fabs(exact[k]), 1.0);
        if (err > out.max_rel_error) {
            out.max_rel_error = err;
            out.worst_k = k;
        }
    }
    return out;
}

} // namespace dckit
