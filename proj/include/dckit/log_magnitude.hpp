#pragma once

#include <cmath>
#include <compare>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace dckit {

/// Log of a nonnegative real. A value of -inf encodes zero; +inf and NaN never occur on valid input.
class LogMagnitude {
public:
    constexpr LogMagnitude() noexcept : value_(-std::numeric_limits<double>::infinity()) {}

    static constexpr LogMagnitude from_log(double log_value) noexcept { return LogMagnitude(log_value); }
    /// `x` must be >= 0.
    static LogMagnitude from_linear(double x) noexcept { return LogMagnitude(std::log(x)); }
    static constexpr LogMagnitude zero() noexcept { return LogMagnitude(); }
    static constexpr LogMagnitude one() noexcept { return LogMagnitude(0.0); }

    constexpr double log() const noexcept { return value_; }
    double linear() const noexcept { return std::exp(value_); }
    constexpr bool is_zero() const noexcept { return value_ == -std::numeric_limits<double>::infinity(); }
    bool is_finite() const noexcept { return std::isfinite(value_); }

    /// Raise to a real power; zero stays zero for positive exponents.
    LogMagnitude pow(double exponent) const noexcept {
        if (is_zero())
            return exponent > 0 ? zero() : (exponent == 0 ? one() : LogMagnitude(std::numeric_limits<double>::infinity()));
        return LogMagnitude(value_ * exponent);
    }

    LogMagnitude& operator*=(LogMagnitude b) noexcept {
        value_ = (is_zero() || b.is_zero()) ? -std::numeric_limits<double>::infinity() : value_ + b.value_;
        return *this;
    }
    LogMagnitude& operator/=(LogMagnitude b) noexcept {
        value_ = is_zero() ? value_ : value_ - b.value_;
        return *this;
    }
    LogMagnitude& operator+=(LogMagnitude b) noexcept {
        if (b.is_zero())
            return *this;
        if (is_zero()) {
            value_ = b.value_;
            return *this;
        }
        const double hi = value_ > b.value_ ? value_ : b.value_;
        const double lo = value_ > b.value_ ? b.value_ : value_;
        value_ = hi + std::log1p(std::exp(lo - hi));
        return *this;
    }

    friend LogMagnitude operator*(LogMagnitude a, LogMagnitude b) noexcept { return a *= b; }
    friend LogMagnitude operator/(LogMagnitude a, LogMagnitude b) noexcept { return a /= b; }
    friend LogMagnitude operator+(LogMagnitude a, LogMagnitude b) noexcept { return a += b; }

    /// |a - b| for magnitudes; exact order of arguments does not matter.
    friend LogMagnitude abs_difference(LogMagnitude a, LogMagnitude b) noexcept {
        if (a.value_ < b.value_)
            std::swap(a, b);
        if (b.is_zero())
            return a;
        if (a.value_ == b.value_)
            return zero();
        return LogMagnitude(a.value_ + std::log1p(-std::exp(b.value_ - a.value_)));
    }

    friend constexpr bool operator==(LogMagnitude a, LogMagnitude b) noexcept { return a.value_ == b.value_; }
    friend constexpr auto operator<=>(LogMagnitude a, LogMagnitude b) noexcept { return a.value_ <=> b.value_; }

private:
    constexpr explicit LogMagnitude(double v) noexcept : value_(v) {}
    double value_;
};

/// Signed real in sign/log-magnitude form; sign is 0 exactly when the magnitude is zero.
struct SignedLog {
    int sign = 0;
    LogMagnitude magnitude = LogMagnitude::zero();

    static SignedLog from_linear(double x) noexcept {
        if (x == 0.0)
            return {};
        return {x > 0 ? 1 : -1, LogMagnitude::from_linear(std::fabs(x))};
    }
    static SignedLog from_log(int sign, double log_magnitude) noexcept {
        if (sign == 0 || log_magnitude == -std::numeric_limits<double>::infinity())
            return {};
        return {sign > 0 ? 1 : -1, LogMagnitude::from_log(log_magnitude)};
    }

    double linear() const noexcept { return sign == 0 ? 0.0 : sign * magnitude.linear(); }
    bool is_zero() const noexcept { return sign == 0; }

    friend SignedLog operator*(SignedLog a, SignedLog b) noexcept {
        if (a.sign == 0 || b.sign == 0)
            return {};
        return {a.sign * b.sign, a.magnitude * b.magnitude};
    }
};

/// Compensated sum of many magnitudes given as logs, relative to a fixed pivot exponent.
///
/// Terms are accumulated as exp(log - pivot) with Neumaier summation, so sums of many equal
/// terms are exact up to 2^53 terms. The pivot should be the largest log expected; larger
/// terms trigger a rescale.
class LogSumAccumulator {
public:
    explicit LogSumAccumulator(double pivot = 0.0) noexcept : pivot_(pivot) {}

    void add(LogMagnitude term) noexcept {
        if (term.is_zero())
            return;
        if (term.log() > pivot_ + 600.0)
            rescale(term.log());
        const double x = std::exp(term.log() - pivot_);
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x))
            compensation_ += (sum_ - t) + x;
        else
            compensation_ += (x - t) + sum_;
        sum_ = t;
    }

    LogMagnitude total() const noexcept {
        const double s = sum_ + compensation_;
        if (s <= 0.0)
            return LogMagnitude::zero();
        return LogMagnitude::from_log(pivot_ + std::log(s));
    }

private:
    void rescale(double new_pivot) noexcept {
        const double factor = std::exp(pivot_ - new_pivot);
        sum_ *= factor;
        compensation_ *= factor;
        pivot_ = new_pivot;
    }

    double pivot_;
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

/// log(k!) for k >= 0. Tabulated from a long-double running sum for small k, log-gamma beyond.
double log_factorial(std::size_t k);

/// Distance between two doubles measured in units of ulp(scale).
double ulp_distance(double a, double b, double scale) noexcept;

} // namespace dckit
