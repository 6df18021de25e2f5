#include "dckit/report.hpp"

#include <cmath>
#include <cstdio>

#include "dckit/decimal.hpp"

namespace dckit {

const char* to_string(Status s) noexcept {
    switch (s) {
    case Status::Holds:
        return "Holds";
    case Status::Fails:
        return "Fails";
    case Status::Inconclusive:
        return "Inconclusive";
    }
    return "Inconclusive";
}

int exit_code(Status s) noexcept {
    switch (s) {
    case Status::Holds:
        return 0;
    case Status::Fails:
        return 1;
    case Status::Inconclusive:
        return 2;
    }
    return 2;
}

Json json_number(double x) {
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    return x;
}

Json json_numbers(const std::vector<double>& xs) {
    Json a = Json::array();
    for (double x : xs)
        a.push_back(json_number(x));
    return a;
}

Json to_json(const Verdict& v) {
    Json j;
    j["property"] = v.property;
    j["status"] = to_string(v.status);
    j["witness"] = v.witness;
    j["statistic"] = json_number(v.statistic);
    j["kmax"] = v.kmax;
    Json params = v.params.is_null() ? Json::object() : v.params;
    if (!v.note.empty())
        params["note"] = v.note;
    j["params"] = params;
    return j;
}

Json AnalysisConfig::to_json() const {
    Json j;
    j["convex_tol"] = convex_tol;
    j["stab_tol"] = stab_tol;
    j["decay_factor"] = decay_factor;
    j["growth_factor"] = growth_factor;
    j["qa_margin"] = qa_margin;
    return j;
}

namespace {

void write(const Json& j, std::string& out, int indent, int depth) {
    auto newline = [&](int d) {
        if (indent >= 0) {
            out += '\n';
            out.append(static_cast<std::size_t>(indent * d), ' ');
        }
    };
    switch (j.type()) {
    case Json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += '{';
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first)
                out += ',';
            first = false;
            newline(depth + 1);
            out += Json(it.key()).dump();
            out += indent >= 0 ? ": " : ":";
            write(it.value(), out, indent, depth + 1);
        }
        newline(depth);
        out += '}';
        return;
    }
    case Json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        out += '[';
        bool first = true;
        for (const auto& e : j) {
            if (!first)
                out += ',';
            first = false;
            newline(depth + 1);
            write(e, out, indent, depth + 1);
        }
        newline(depth);
        out += ']';
        return;
    }
    case Json::value_t::number_float:
        out += json_number(j.get<double>()).is_string() ? json_number(j.get<double>()).dump()
                                                        : format_double(j.get<double>());
        return;
    default:
        out += j.dump();
        return;
    }
}

} // namespace

std::string dump_json(const Json& j, int indent) {
    std::string out;
    write(j, out, indent, 0);
    out += '\n';
    return out;
}

} // namespace dckit
