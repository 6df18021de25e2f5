#include "dckit/decimal.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <system_error>

namespace dckit {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

constexpr double kLn10 = 2.302585092994045684017991454684364208;

} // namespace

std::optional<DecimalToken> scan_decimal(std::string_view text, std::size_t& pos) {
    std::size_t i = pos;
    DecimalToken tok;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
        tok.negative = text[i] == '-';
        ++i;
    }
    const std::size_t mantissa_begin = i;
    std::size_t digits = 0;
    while (i < text.size() && is_digit(text[i])) {
        ++i;
        ++digits;
    }
    if (i < text.size() && text[i] == '.') {
        ++i;
        while (i < text.size() && is_digit(text[i])) {
            ++i;
            ++digits;
        }
    }
    if (digits == 0)
        return std::nullopt;
    const std::size_t mantissa_end = i;
    long long exponent = 0;
    if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < text.size() && (text[j] == '+' || text[j] == '-'))
            ++j;
        const std::size_t exp_digits_begin = j;
        while (j < text.size() && is_digit(text[j]))
            ++j;
        if (j > exp_digits_begin) {
            const char* first = text.data() + (text[i + 1] == '+' ? i + 2 : i + 1);
            auto [ptr, ec] = std::from_chars(first, text.data() + j, exponent);
            if (ec != std::errc())
                return std::nullopt;
            i = j;
        }
    }
    tok.text = std::string(text.substr(pos, i - pos));

    double mantissa = 0.0;
    {
        auto [ptr, ec] = std::from_chars(text.data() + mantissa_begin, text.data() + mantissa_end, mantissa,
                                         std::chars_format::fixed);
        if (ec != std::errc() && ec != std::errc::result_out_of_range)
            return std::nullopt;
        if (ec == std::errc::result_out_of_range)
            mantissa = std::numeric_limits<double>::infinity();
    }
    if (mantissa == 0.0) {
        tok.zero = true;
        tok.log_abs = -std::numeric_limits<double>::infinity();
        tok.value = tok.negative ? -0.0 : 0.0;
        pos = i;
        return tok;
    }

    double whole = 0.0;
    auto [ptr, ec] = std::from_chars(text.data() + mantissa_begin, text.data() + i, whole);
    if (ec == std::errc() && std::isfinite(whole) && std::fabs(whole) >= std::numeric_limits<double>::min()) {
        tok.value = tok.negative ? -whole : whole;
        tok.log_abs = std::log(whole);
    } else if (std::isfinite(mantissa)) {
        tok.log_abs = std::log(mantissa) + static_cast<double>(exponent) * kLn10;
    } else {
        // Mantissa alone overflows: rescale its digit string.
        const std::string_view m = text.substr(mantissa_begin, mantissa_end - mantissa_begin);
        const std::size_t dot = m.find('.');
        const std::size_t int_len = dot == std::string_view::npos ? m.size() : dot;
        std::string scaled = "0.";
        for (char c : m)
            if (c != '.')
                scaled += c;
        double frac = 0.0;
        std::from_chars(scaled.data(), scaled.data() + scaled.size(), frac);
        tok.log_abs = std::log(frac) + (static_cast<double>(exponent) + static_cast<double>(int_len)) * kLn10;
    }
    pos = i;
    return tok;
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string format_log_decimal(double log_value) {
    if (log_value == -std::numeric_limits<double>::infinity())
        return "0";
    const double linear = std::exp(log_value);
    if (std::isfinite(linear) && linear >= std::numeric_limits<double>::min())
        return format_double(linear);
    double e10 = std::floor(log_value / kLn10);
    double mantissa = std::exp(log_value - e10 * kLn10);
    if (mantissa >= 10.0) {
        mantissa /= 10.0;
        e10 += 1.0;
    } else if (mantissa < 1.0) {
        mantissa *= 10.0;
        e10 -= 1.0;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.16fe%lld", mantissa, static_cast<long long>(e10));
    return buf;
}

} // namespace dckit
