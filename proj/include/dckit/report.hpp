#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "json.hpp"

namespace dckit {

using Json = nlohmann::ordered_json;

enum class Status { Holds, Fails, Inconclusive };

const char* to_string(Status s) noexcept;

/// Exit code convention of the command-line tool: 0 Holds, 1 Fails, 2 Inconclusive.
int exit_code(Status s) noexcept;

/// Three-valued decision with its numeric evidence.
struct Verdict {
    std::string property;
    Status status = Status::Inconclusive;
    std::vector<std::size_t> witness;  ///< empty, one index, or an index pair
    double statistic = std::numeric_limits<double>::quiet_NaN();
    std::size_t kmax = 0;
    Json params = Json::object();
    std::string note;

    bool holds() const noexcept { return status == Status::Holds; }
    bool fails() const noexcept { return status == Status::Fails; }
};

/// {property, status, witness, statistic, kmax, params}; note is folded into params.
Json to_json(const Verdict& v);

/// JSON for a double; non-finite values become the strings "inf", "-inf", "nan".
Json json_number(double x);
Json json_numbers(const std::vector<double>& xs);

/// Deterministic serialization: fixed key order, floats with 17 significant digits.
std::string dump_json(const Json& j, int indent = 2);

/// Thresholds of the asymptotic tests.
struct AnalysisConfig {
    double convex_tol = 1e-9;        ///< additive tolerance on log values in convexity checks
    double stab_tol = 0.01;          ///< running max over the last quarter may grow by this fraction
    double decay_factor = 2.0 / 3.0; ///< r_kmax <= decay_factor * r_{kmax/2} for "tends to 0"
    double growth_factor = 1.5;      ///< s_kmax >= growth_factor * s_{kmax/2} for "tends to infinity"
    double qa_margin = 0.05;         ///< margin around p = 1 in the tail-exponent fit

    Json to_json() const;
};

} // namespace dckit
