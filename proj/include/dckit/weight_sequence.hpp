#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dckit/log_magnitude.hpp"

namespace dckit {

namespace detail {
struct SequenceNode;
}

/// A positive sequence (M_k) held in log-domain.
///
/// Values are immutable and cheap to copy (shared, immutable node graph). Closed forms are
/// unbounded; explicit data carries the last stored index in kmax_hint() and evaluation beyond it
/// throws IndexOutOfRange.
class WeightSequence {
public:
    enum class Kind { Constant, Gevrey, QPower, Explicit, Scaled, Shifted, Min };

    /// M_k = c for all k; c > 0.
    static WeightSequence constant(double c = 1.0);
    /// M_k = (k!)^s.
    static WeightSequence gevrey(double s);
    /// M_k = q^(k^2); q > 0.
    static WeightSequence qpower(double q);
    /// Explicit positive values M_0..M_n.
    static WeightSequence explicit_values(const std::vector<double>& values);
    /// Explicit data given as natural logs log M_0..log M_n.
    static WeightSequence explicit_logs(std::vector<double> logs);

    Kind kind() const noexcept;
    /// Last index with stored data; nullopt for closed forms.
    std::optional<std::size_t> kmax_hint() const noexcept;

    LogMagnitude eval_log(std::size_t k) const;
    /// log M_0 .. log M_kmax.
    std::vector<double> logs(std::size_t kmax) const;

    /// Spec-grammar text that parses back to this sequence.
    std::string render() const;

private:
    friend struct detail::SequenceNode;
    friend WeightSequence scale_log(const WeightSequence&, LogMagnitude, LogMagnitude, std::string, std::string);
    friend WeightSequence shift(const WeightSequence&);
    friend WeightSequence pointwise_min(const WeightSequence&, const WeightSequence&);
    friend WeightSequence parse_sequence_spec(std::string_view);
    friend class SpecParser;

    explicit WeightSequence(std::shared_ptr<const detail::SequenceNode> node) : node_(std::move(node)) {}
    std::shared_ptr<const detail::SequenceNode> node_;
};

inline LogMagnitude eval_log(const WeightSequence& m, std::size_t k) { return m.eval_log(k); }

/// log(k! M_k).
LogMagnitude weighted_log(const WeightSequence& m, std::size_t k);

/// (C rho^k M_k); C > 0 and rho > 0, otherwise InvalidParameter.
WeightSequence scale(const WeightSequence& m, double c, double rho);
/// As scale(), with C and rho given in log-domain. The text arguments are used for rendering
/// and default to decimal renderings of the logs.
WeightSequence scale_log(const WeightSequence& m, LogMagnitude c, LogMagnitude rho, std::string c_text = {},
                         std::string rho_text = {});

/// Scaling with C = 1/M_0 and the least rho >= 1 giving M_1 >= 1 afterwards.
WeightSequence normalize(const WeightSequence& m);

/// (M_{k+1}).
WeightSequence shift(const WeightSequence& m);

/// (min(M_k, N_k)).
WeightSequence pointwise_min(const WeightSequence& m, const WeightSequence& n);

/// Parse the sequence-spec grammar:
///
///     spec := "const:" num | "gevrey:s=" num | "qpow:q=" num
///           | "explicit:[" num ("," num)* "]" | "file:" path
///           | "scale(" spec ";C=" num ";rho=" num ")" | "shift(" spec ")" | "min(" spec ";" spec ")"
///
/// A path runs to the next ';' or ')' (or end of input). Throws ParseError on anything else.
WeightSequence parse_sequence_spec(std::string_view spec);

inline std::string render(const WeightSequence& m) { return m.render(); }

/// Read the one-value-per-line file format (blank lines and '#' comments skipped).
std::vector<double> read_sequence_file(const std::string& path);

/// Write log values in the one-value-per-line file format.
std::string format_sequence_lines(const std::vector<double>& logs);

} // namespace dckit
