#include "dckit/weight_sequence.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dckit/decimal.hpp"
#include "dckit/error.hpp"

namespace dckit {

namespace detail {

struct SequenceNode {
    using Kind = WeightSequence::Kind;

    Kind kind = Kind::Constant;
    std::optional<std::size_t> hint;

    double log_a = 0.0; // const: log c; gevrey: s; qpow: log q; scaled: log C
    double log_b = 0.0; // scaled: log rho
    std::string text_a, text_b;

    std::vector<double> logs;         // explicit
    std::vector<std::string> texts;   // explicit, optional canonical literals

    std::shared_ptr<const SequenceNode> left, right;

    LogMagnitude eval(std::size_t k) const {
        if (hint && k > *hint)
            throw IndexOutOfRange(k, *hint);
        switch (kind) {
        case Kind::Constant:
            return LogMagnitude::from_log(log_a);
        case Kind::Gevrey:
            return LogMagnitude::from_log(log_a * log_factorial(k));
        case Kind::QPower: {
            const double kk = static_cast<double>(k);
            return LogMagnitude::from_log(kk * kk * log_a);
        }
        case Kind::Explicit:
            return LogMagnitude::from_log(logs[k]);
        case Kind::Scaled:
            return LogMagnitude::from_log(log_a + static_cast<double>(k) * log_b + left->eval(k).log());
        case Kind::Shifted:
            return left->eval(k + 1);
        case Kind::Min:
            return std::min(left->eval(k), right->eval(k));
        }
        return LogMagnitude::zero();
    }

    std::string render() const {
        switch (kind) {
        case Kind::Constant:
            return "const:" + text_a;
        case Kind::Gevrey:
            return "gevrey:s=" + text_a;
        case Kind::QPower:
            return "qpow:q=" + text_a;
        case Kind::Explicit: {
            std::string out = "explicit:[";
            for (std::size_t i = 0; i < logs.size(); ++i) {
                if (i)
                    out += ',';
                out += texts.empty() ? format_log_decimal(logs[i]) : texts[i];
            }
            return out + "]";
        }
        case Kind::Scaled:
            return "scale(" + left->render() + ";C=" + text_a + ";rho=" + text_b + ")";
        case Kind::Shifted:
            return "shift(" + left->render() + ")";
        case Kind::Min:
            return "min(" + left->render() + ";" + right->render() + ")";
        }
        return {};
    }
};

} // namespace detail

using detail::SequenceNode;

namespace {

std::string canonical_text(const DecimalToken& tok) {
    if (tok.value)
        return format_double(*tok.value);
    return tok.text;
}

std::shared_ptr<SequenceNode> make_explicit(std::vector<double> logs, std::vector<std::string> texts) {
    if (logs.empty())
        throw InvalidParameter("explicit sequence needs at least one value");
    for (double v : logs)
        if (!std::isfinite(v))
            throw InvalidParameter("explicit sequence values must be positive and finite");
    auto node = std::make_shared<SequenceNode>();
    node->kind = WeightSequence::Kind::Explicit;
    node->hint = logs.size() - 1;
    node->logs = std::move(logs);
    node->texts = std::move(texts);
    return node;
}

std::optional<std::size_t> min_hint(std::optional<std::size_t> a, std::optional<std::size_t> b) {
    if (!a)
        return b;
    if (!b)
        return a;
    return std::min(*a, *b);
}

struct ParsedFile {
    std::vector<double> logs;
    std::vector<std::string> texts;
};

ParsedFile parse_sequence_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw InvalidParameter("cannot open sequence file '" + path + "'");
    ParsedFile out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#')
            continue;
        std::size_t pos = first;
        auto tok = scan_decimal(line, pos);
        const auto rest = line.find_first_not_of(" \t\r", pos);
        if (!tok || rest != std::string::npos || tok->negative || tok->zero)
            throw InvalidParameter("sequence file '" + path + "' line " + std::to_string(line_no) +
                                   ": expected one positive decimal");
        out.logs.push_back(tok->log_abs);
        out.texts.push_back(canonical_text(*tok));
    }
    if (out.logs.empty())
        throw InvalidParameter("sequence file '" + path + "' holds no values");
    return out;
}

} // namespace

WeightSequence WeightSequence::constant(double c) {
    if (!(c > 0) || !std::isfinite(c))
        throw InvalidParameter("constant sequence needs c > 0");
    auto node = std::make_shared<SequenceNode>();
    node->kind = Kind::Constant;
    node->log_a = std::log(c);
    node->text_a = format_double(c);
    return WeightSequence(node);
}

WeightSequence WeightSequence::gevrey(double s) {
    if (!std::isfinite(s))
        throw InvalidParameter("gevrey exponent must be finite");
    auto node = std::make_shared<SequenceNode>();
    node->kind = Kind::Gevrey;
    node->log_a = s;
    node->text_a = format_double(s);
    return WeightSequence(node);
}

WeightSequence WeightSequence::qpower(double q) {
    if (!(q > 0) || !std::isfinite(q))
        throw InvalidParameter("qpow needs q > 0");
    auto node = std::make_shared<SequenceNode>();
    node->kind = Kind::QPower;
    node->log_a = std::log(q);
    node->text_a = format_double(q);
    return WeightSequence(node);
}

WeightSequence WeightSequence::explicit_values(const std::vector<double>& values) {
    std::vector<double> logs;
    std::vector<std::string> texts;
    logs.reserve(values.size());
    for (double v : values) {
        if (!(v > 0) || !std::isfinite(v))
            throw InvalidParameter("explicit sequence values must be positive and finite");
        logs.push_back(std::log(v));
        texts.push_back(format_double(v));
    }
    return WeightSequence(make_explicit(std::move(logs), std::move(texts)));
}

WeightSequence WeightSequence::explicit_logs(std::vector<double> logs) {
    return WeightSequence(make_explicit(std::move(logs), {}));
}

WeightSequence::Kind WeightSequence::kind() const noexcept { return node_->kind; }

std::optional<std::size_t> WeightSequence::kmax_hint() const noexcept { return node_->hint; }

LogMagnitude WeightSequence::eval_log(std::size_t k) const { return node_->eval(k); }

std::vector<double> WeightSequence::logs(std::size_t kmax) const {
    std::vector<double> out(kmax + 1);
    for (std::size_t k = 0; k <= kmax; ++k)
        out[k] = node_->eval(k).log();
    return out;
}

std::string WeightSequence::render() const { return node_->render(); }

LogMagnitude weighted_log(const WeightSequence& m, std::size_t k) {
    return LogMagnitude::from_log(log_factorial(k) + m.eval_log(k).log());
}

WeightSequence scale_log(const WeightSequence& m, LogMagnitude c, LogMagnitude rho, std::string c_text,
                         std::string rho_text) {
    if (!c.is_finite() || !rho.is_finite())
        throw InvalidParameter("scale needs C > 0 and rho > 0");
    auto node = std::make_shared<SequenceNode>();
    node->kind = WeightSequence::Kind::Scaled;
    node->hint = m.kmax_hint();
    node->log_a = c.log();
    node->log_b = rho.log();
    node->text_a = c_text.empty() ? format_log_decimal(c.log()) : std::move(c_text);
    node->text_b = rho_text.empty() ? format_log_decimal(rho.log()) : std::move(rho_text);
    node->left = m.node_;
    return WeightSequence(node);
}

WeightSequence scale(const WeightSequence& m, double c, double rho) {
    if (!(c > 0) || !(rho > 0) || !std::isfinite(c) || !std::isfinite(rho))
        throw InvalidParameter("scale needs C > 0 and rho > 0");
    return scale_log(m, LogMagnitude::from_linear(c), LogMagnitude::from_linear(rho), format_double(c),
                     format_double(rho));
}

WeightSequence normalize(const WeightSequence& m) {
    const double log_m0 = m.eval_log(0).log();
    const double log_m1 = m.eval_log(1).log();
    const double log_c = -log_m0;
    if (log_m0 == 0.0 && log_m1 >= 0.0)
        return m;
    double log_rho = std::max(0.0, log_m0 - log_m1);
    // Round the new M_1 up to >= 1 exactly so a second pass is a no-op.
    while (log_c + log_rho + log_m1 < 0.0)
        log_rho = std::nextafter(log_rho, INFINITY);
    return scale_log(m, LogMagnitude::from_log(log_c), LogMagnitude::from_log(log_rho));
}

WeightSequence shift(const WeightSequence& m) {
    auto node = std::make_shared<SequenceNode>();
    node->kind = WeightSequence::Kind::Shifted;
    if (auto h = m.kmax_hint()) {
        if (*h == 0)
            throw IndexOutOfRange(1, 0);
        node->hint = *h - 1;
    }
    node->left = m.node_;
    return WeightSequence(node);
}

WeightSequence pointwise_min(const WeightSequence& m, const WeightSequence& n) {
    auto node = std::make_shared<SequenceNode>();
    node->kind = WeightSequence::Kind::Min;
    node->hint = min_hint(m.kmax_hint(), n.kmax_hint());
    node->left = m.node_;
    node->right = n.node_;
    return WeightSequence(node);
}

class SpecParser {
public:
    explicit SpecParser(std::string_view text) : text_(text) {}

    WeightSequence parse_all() {
        auto node = parse_spec();
        if (pos_ != text_.size())
            throw ParseError(pos_, "end of input");
        return WeightSequence(node);
    }

private:
    bool consume(std::string_view lit) {
        if (text_.substr(pos_, lit.size()) == lit) {
            pos_ += lit.size();
            return true;
        }
        return false;
    }

    void expect(std::string_view lit) {
        if (!consume(lit))
            throw ParseError(pos_, "'" + std::string(lit) + "'");
    }

    DecimalToken number() {
        const std::size_t at = pos_;
        auto tok = scan_decimal(text_, pos_);
        if (!tok)
            throw ParseError(at, "decimal number");
        return *tok;
    }

    DecimalToken positive_number() {
        const std::size_t at = pos_;
        auto tok = number();
        if (tok.negative || tok.zero)
            throw ParseError(at, "positive decimal number");
        return tok;
    }

    std::shared_ptr<const SequenceNode> parse_spec() {
        const std::size_t at = pos_;
        if (consume("const:")) {
            auto tok = positive_number();
            auto node = std::make_shared<SequenceNode>();
            node->kind = WeightSequence::Kind::Constant;
            node->log_a = tok.log_abs;
            node->text_a = canonical_text(tok);
            return node;
        }
        if (consume("gevrey:s=")) {
            const std::size_t num_at = pos_;
            auto tok = number();
            if (!tok.value)
                throw ParseError(num_at, "finite gevrey exponent");
            auto node = std::make_shared<SequenceNode>();
            node->kind = WeightSequence::Kind::Gevrey;
            node->log_a = *tok.value;
            node->text_a = canonical_text(tok);
            return node;
        }
        if (consume("qpow:q=")) {
            auto tok = positive_number();
            auto node = std::make_shared<SequenceNode>();
            node->kind = WeightSequence::Kind::QPower;
            node->log_a = tok.log_abs;
            node->text_a = canonical_text(tok);
            return node;
        }
        if (consume("explicit:[")) {
            std::vector<double> logs;
            std::vector<std::string> texts;
            do {
                auto tok = positive_number();
                logs.push_back(tok.log_abs);
                texts.push_back(canonical_text(tok));
            } while (consume(","));
            expect("]");
            return make_explicit(std::move(logs), std::move(texts));
        }
        if (consume("file:")) {
            const std::size_t path_at = pos_;
            const std::size_t end = text_.find_first_of(";)", pos_);
            const std::size_t stop = end == std::string_view::npos ? text_.size() : end;
            if (stop == pos_)
                throw ParseError(pos_, "file path");
            const std::string path(text_.substr(pos_, stop - pos_));
            pos_ = stop;
            try {
                auto file = parse_sequence_file(path);
                return make_explicit(std::move(file.logs), std::move(file.texts));
            } catch (const InvalidParameter& e) {
                throw ParseError(path_at, std::string("readable sequence file (") + e.what() + ")");
            }
        }
        if (consume("scale(")) {
            auto inner = parse_spec();
            expect(";C=");
            auto c = positive_number();
            expect(";rho=");
            auto rho = positive_number();
            expect(")");
            auto node = std::make_shared<SequenceNode>();
            node->kind = WeightSequence::Kind::Scaled;
            node->hint = inner->hint;
            node->log_a = c.log_abs;
            node->log_b = rho.log_abs;
            node->text_a = canonical_text(c);
            node->text_b = canonical_text(rho);
            node->left = inner;
            return node;
        }
        if (consume("shift(")) {
            auto inner = parse_spec();
            expect(")");
            auto node = std::make_shared<SequenceNode>();
            node->kind = WeightSequence::Kind::Shifted;
            if (inner->hint) {
                if (*inner->hint == 0)
                    throw ParseError(at, "sequence with at least two stored values inside shift(");
                node->hint = *inner->hint - 1;
            }
            node->left = inner;
            return node;
        }
        if (consume("min(")) {
            auto a = parse_spec();
            expect(";");
            auto b = parse_spec();
            expect(")");
            auto node = std::make_shared<SequenceNode>();
            node->kind = WeightSequence::Kind::Min;
            node->hint = min_hint(a->hint, b->hint);
            node->left = a;
            node->right = b;
            return node;
        }
        throw ParseError(at, "one of const:, gevrey:s=, qpow:q=, explicit:[, file:, scale(, shift(, min(");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

WeightSequence parse_sequence_spec(std::string_view spec) { return SpecParser(spec).parse_all(); }

std::vector<double> read_sequence_file(const std::string& path) { return parse_sequence_file(path).logs; }

std::string format_sequence_lines(const std::vector<double>& logs) {
    std::string out;
    for (double l : logs) {
        out += format_log_decimal(l);
        out += '\n';
    }
    return out;
}

} // namespace dckit
