#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qkdcopy {

/// Single-photon detector parameters: a real photon fires the detector with
/// probability eta, and independently a dark count fires it with probability
/// dark_p per gate. p_opt is the per-measurement optical error rate and only
/// feeds the whole-measurement-error computation.
struct DetectorSpec {
    double eta = 0.0;
    double dark_p = 0.0;
    double p_opt = 0.0;

    void validate() const {
        if (!(eta >= 0.0 && eta <= 1.0))
            throw std::invalid_argument("DetectorSpec: eta must be in [0,1], got " + std::to_string(eta));
        if (!(dark_p >= 0.0 && dark_p < 1.0))
            throw std::invalid_argument("DetectorSpec: dark_p must be in [0,1), got " + std::to_string(dark_p));
        if (!(p_opt >= 0.0 && p_opt < 1.0))
            throw std::invalid_argument("DetectorSpec: p_opt must be in [0,1), got " + std::to_string(p_opt));
    }
};

/// Fiber channel: loss coefficient alpha in dB/km and length in km.
struct ChannelSpec {
    double alpha = 0.2;
    double length_km = 0.0;

    void validate() const {
        if (!(alpha >= 0.0))
            throw std::invalid_argument("ChannelSpec: alpha must be >= 0, got " + std::to_string(alpha));
        if (!(length_km >= 0.0))
            throw std::invalid_argument("ChannelSpec: length_km must be >= 0, got " + std::to_string(length_km));
    }
};

/// Copy depth and vote threshold. For the qutrit and twin-field variants d is
/// the number of auxiliary partite (d+1 measurement groups); for the qubit
/// variant d counts double-copies (d+1 groups: one singleton plus d pairs).
struct CopyConfig {
    int d = 0;
    int m = 1;

    void validate() const {
        if (d < 0)
            throw std::invalid_argument("CopyConfig: d must be >= 0, got " + std::to_string(d));
        if (m < 1 || m > d + 1)
            throw std::invalid_argument("CopyConfig: m must satisfy 1 <= m <= d+1, got m=" +
                                        std::to_string(m) + " with d=" + std::to_string(d));
    }
};

enum class Protocol { QubitBB84, QutritBB84, TwinField };

inline const char* protocol_name(Protocol p) {
    switch (p) {
        case Protocol::QubitBB84: return "qubit";
        case Protocol::QutritBB84: return "qutrit";
        case Protocol::TwinField: return "tf";
    }
    return "?";
}

struct ProtocolVariant {
    Protocol protocol = Protocol::QubitBB84;
    CopyConfig copy;

    void validate() const { copy.validate(); }

    /// Number of measurement groups entering the vote.
    int group_count() const { return copy.d + 1; }
};

/// Exact categorical distribution of one measurement group's outcome.
struct GroupDistribution {
    double p_out0 = 0.0;
    double p_out1 = 0.0;
    double p_ineff = 1.0;

    double sum() const { return p_out0 + p_out1 + p_ineff; }
};

/// Channel-level scenario for one pulse. For twin-field, Transmitted means the
/// interference at the middle node succeeded and Lost means it did not.
enum class Scenario { Transmitted, Lost };

enum class RatePath { PaperSums, Approx, Oracle, MonteCarlo };

inline const char* rate_path_name(RatePath p) {
    switch (p) {
        case RatePath::PaperSums: return "paper-sums";
        case RatePath::Approx: return "approx";
        case RatePath::Oracle: return "oracle";
        case RatePath::MonteCarlo: return "montecarlo";
    }
    return "?";
}

/// Sift rate, error rate and their ratio (QBER), tagged with the computation
/// path that produced them. When the sift rate underflows to exactly zero the
/// QBER is undefined and reported as NaN with qber_defined = false.
struct RateReport {
    double sift_rate = 0.0;
    double error_rate = 0.0;
    double qber = std::numeric_limits<double>::quiet_NaN();
    bool qber_defined = false;
    RatePath path = RatePath::PaperSums;

    static RateReport make(double sift, double err, RatePath path) {
        RateReport r;
        r.sift_rate = sift;
        r.error_rate = err;
        r.path = path;
        if (sift > 0.0) {
            r.qber = err / sift;
            r.qber_defined = true;
        }
        return r;
    }
};

}  // namespace qkdcopy
