#include "dckit/log_magnitude.hpp"

#include <array>
#include <cmath>

namespace dckit {

namespace {

constexpr std::size_t kFactorialTableSize = 1u << 14;

const std::vector<double>& factorial_table() {
    static const std::vector<double> table = [] {
        std::vector<double> t(kFactorialTableSize);
        long double acc = 0.0L;
        t[0] = 0.0;
        for (std::size_t k = 1; k < kFactorialTableSize; ++k) {
            acc += std::log(static_cast<long double>(k));
            t[k] = static_cast<double>(acc);
        }
        return t;
    }();
    return table;
}

} // namespace

double log_factorial(std::size_t k) {
    if (k < kFactorialTableSize)
        return factorial_table()[k];
    return std::lgamma(static_cast<double>(k) + 1.0);
}

double ulp_distance(double a, double b, double scale) noexcept {
    if (a == b)
        return 0.0;
    const double s = std::fabs(scale);
    const double ulp = s > 0 ? std::nextafter(s, INFINITY) - s : std::numeric_limits<double>::denorm_min();
    return std::fabs(a - b) / ulp;
}

} // namespace dckit
