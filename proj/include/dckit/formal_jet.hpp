#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dckit/log_magnitude.hpp"
#include "dckit/weight_sequence.hpp"

namespace dckit {

/// Truncated jet f_0..f_K of derivative values at a basepoint (series coefficient f_k/k!).
struct FormalJet {
    std::vector<SignedLog> coeffs;

    FormalJet() = default;
    explicit FormalJet(std::vector<SignedLog> c) : coeffs(std::move(c)) {}

    static FormalJet from_values(const std::vector<double>& values);
    static FormalJet zero(std::size_t order);
    /// f_1 = 1, all others 0.
    static FormalJet identity(std::size_t order);
    /// f_k = k! M_k.
    static FormalJet weighted(const WeightSequence& m, std::size_t order);
    /// f_k = (k!)^p.
    static FormalJet factorial_power(double p, std::size_t order);
    /// f_k = r^k.
    static FormalJet geometric(double r, std::size_t order);

    std::size_t order() const noexcept { return coeffs.empty() ? 0 : coeffs.size() - 1; }
    const SignedLog& operator[](std::size_t k) const { return coeffs.at(k); }
    std::vector<double> values() const;
};

/// CSV lines "k,sign,log10magnitude" or "k,value" (auto-detected per line); '#' comments and
/// blank lines skipped. Indices must be 0..K without gaps.
FormalJet parse_jet_csv(const std::string& text);
FormalJet read_jet_file(const std::string& path);
std::string format_jet_csv(const FormalJet& f);

/// Jet specs for the command line:
///   file:<path> | values:[v0,v1,...] | factpow:p=<num> | kfactm:<sequence spec> | geom:r=<num>
/// Generated jets use `order` as K.
FormalJet parse_jet_spec(const std::string& spec, std::size_t order);

} // namespace dckit
