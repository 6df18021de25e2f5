#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace dckit {

/// A decimal literal scanned from text: [+-]digits[.digits][(e|E)[+-]digits].
struct DecimalToken {
    std::string text;      ///< exact characters consumed
    bool negative = false; ///< leading minus sign
    bool zero = false;     ///< value is exactly zero
    double log_abs = 0.0;  ///< log|value|; valid even when |value| overflows binary64
    std::optional<double> value; ///< set when the value is a finite binary64 (not flushed to zero)
};

/// Scan a decimal literal starting at `pos`; advances `pos` past it. Returns nullopt (and leaves
/// `pos` untouched) if no literal starts there. Locale-independent.
std::optional<DecimalToken> scan_decimal(std::string_view text, std::size_t& pos);

/// Shortest-form-free rendering with 17 significant digits ("%.17g").
std::string format_double(double x);

/// Render a magnitude given by its natural log as a decimal literal that scan_decimal accepts.
/// Values inside the binary64 range use format_double; others use an explicit mantissa/exponent.
std::string format_log_decimal(double log_value);

} // namespace dckit
