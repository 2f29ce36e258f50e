#pragma once

#include <cmath>

#include "qkdcopy/binomial.hpp"
#include "qkdcopy/types.hpp"

namespace qkdcopy {

/// Channel transmittance t = 10^(-alpha*l/10).
inline double transmittance(const ChannelSpec& channel) {
    channel.validate();
    return std::pow(10.0, -channel.alpha * channel.length_km / 10.0);
}

/// Twin-field branch weights: probability that the middle-node interference
/// succeeds (at least one arm survives) versus both arms lost. The weights sum
/// to one algebraically.
struct TfBranchWeights {
    double interfered = 0.0;
    double not_interfered = 0.0;
};

inline TfBranchWeights tf_branch_weights(double t) {
    double s = std::sqrt(t);
    return {t + 2.0 * s * (1.0 - s), (1.0 - s) * (1.0 - s)};
}

/// Sifting divisor for the twin-field variant (sift prefactor 2/M).
inline constexpr double kTfSiftDivisor = 16.0;

enum class QutritScenario { Transmitted, LostAuxiliary, Empty };

/// Exact single-measurement outcome distribution for a qutrit group. Three
/// detectors gate simultaneously; an outcome is recorded only when exactly one
/// of them clicks, which the (1-p) factors encode.
inline GroupDistribution qutrit_single_probs(const DetectorSpec& det, QutritScenario scenario) {
    det.validate();
    const double eta = det.eta, p = det.dark_p;
    const double q = 1.0 - p;
    const double click_signal = eta + (1.0 - eta) * p;  // photon or dark count
    GroupDistribution g;
    switch (scenario) {
        case QutritScenario::Transmitted:
            // signal photon on the 0-detector
            g.p_out0 = click_signal * q * q;
            g.p_out1 = (1.0 - eta) * q * q * p;
            break;
        case QutritScenario::LostAuxiliary:
            // auxiliary holds |2>, so the 2-detector sees the photon
            g.p_out0 = (1.0 - eta) * p * q * q;
            g.p_out1 = g.p_out0;
            break;
        case QutritScenario::Empty:
            g.p_out0 = p * q * q;
            g.p_out1 = g.p_out0;
            break;
    }
    g.p_ineff = 1.0 - g.p_out0 - g.p_out1;
    return g;
}

enum class QubitGroupKind { Singleton, CopyPair };

/// Exact outcome distribution for a qubit group. A copy-pair is effective only
/// when both of its measurements report the same single outcome; under loss
/// the pair's auxiliaries hold |0> and |1> respectively.
inline GroupDistribution qubit_group_probs(const DetectorSpec& det, QubitGroupKind kind,
                                           Scenario scenario) {
    det.validate();
    const double eta = det.eta, p = det.dark_p;
    const double q = 1.0 - p;
    const double click_signal = eta + (1.0 - eta) * p;
    GroupDistribution g;
    if (kind == QubitGroupKind::Singleton) {
        if (scenario == Scenario::Transmitted) {
            g.p_out0 = click_signal * q;
            g.p_out1 = (1.0 - eta) * q * p;
        } else {
            g.p_out0 = p * q;
            g.p_out1 = g.p_out0;
        }
    } else {
        if (scenario == Scenario::Transmitted) {
            double s0 = click_signal * q;
            double s1 = (1.0 - eta) * q * p;
            g.p_out0 = s0 * s0;
            g.p_out1 = s1 * s1;
        } else {
            g.p_out0 = click_signal * (1.0 - eta) * q * q * p;
            g.p_out1 = g.p_out0;
        }
    }
    g.p_ineff = 1.0 - g.p_out0 - g.p_out1;
    return g;
}

/// Twin-field per-detector click probabilities: signal side versus dark only.
struct TfClickProbs {
    double signal = 0.0;
    double dark = 0.0;
};

inline TfClickProbs tf_single_probs(const DetectorSpec& det) {
    det.validate();
    return {det.eta + (1.0 - det.eta) * det.dark_p, det.dark_p};
}

/// Validity flags for a (variant, detector) combination. regime_ok reflects
/// max_i binom(n, i)*p < 0.01 where n is the total measurement count; cap_ok
/// reflects the d <= 8 (qutrit/TF) or d <= 4 (qubit) caps. Flags only, never
/// an error.
struct ValidityReport {
    bool regime_ok = true;
    bool cap_ok = true;
    double max_binom_p = 0.0;

    bool clean() const { return regime_ok && cap_ok; }
};

inline ValidityReport validate_config(const ProtocolVariant& variant, const DetectorSpec& det) {
    variant.validate();
    det.validate();
    ValidityReport r;
    const int d = variant.copy.d;
    const int n = variant.protocol == Protocol::QubitBB84 ? 2 * d + 1 : d + 1;
    for (int i = 0; i <= n; ++i)
        r.max_binom_p = std::max(r.max_binom_p, choose(n, i) * det.dark_p);
    r.regime_ok = r.max_binom_p < 0.01;
    const int cap = variant.protocol == Protocol::QubitBB84 ? 4 : 8;
    r.cap_ok = d <= cap;
    return r;
}

}  // namespace qkdcopy
