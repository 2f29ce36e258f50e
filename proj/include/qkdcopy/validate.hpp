#pragma once

#include <string>
#include <vector>

#include "qkdcopy/analytic_rates.hpp"
#include "qkdcopy/exact_oracle.hpp"
#include "qkdcopy/montecarlo.hpp"
#include "qkdcopy/types.hpp"

namespace qkdcopy {

/// Built-in cross-validation grid: the executable conjunction of the module
/// agreement contracts. Used by the CLI `validate` subcommand and the test
/// suites.

inline const std::vector<double>& validation_etas() {
    static const std::vector<double> v = {0.1, 0.275, 0.5, 0.59, 0.9};
    return v;
}
inline const std::vector<double>& validation_dark_ps() {
    static const std::vector<double> v = {1e-6, 1e-4, 4.6e-4, 1e-3, 1e-2};
    return v;
}
inline std::vector<double> validation_ts() {
    std::vector<double> v;
    for (int e = 0; e >= -9; --e) v.push_back(std::pow(10.0, e));
    return v;
}
inline const std::vector<ProtocolVariant>& validation_variants() {
    static const std::vector<ProtocolVariant> v = {
        {Protocol::QubitBB84, {0, 1}},  {Protocol::QubitBB84, {4, 3}},
        {Protocol::QutritBB84, {0, 1}}, {Protocol::QutritBB84, {8, 5}},
        {Protocol::TwinField, {0, 1}},  {Protocol::TwinField, {8, 5}},
    };
    return v;
}

struct CrossCheck {
    std::string name;
    bool pass = true;
    double worst = 0.0;
    std::string detail;
};

struct CrossValidation {
    std::vector<CrossCheck> checks;
    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

inline double rel_diff(double a, double b) {
    double scale = std::max({std::fabs(a), std::fabs(b), 1e-300});
    return std::fabs(a - b) / scale;
}

/// paper-sums vs oracle over the (eta, p, t) grid, all variants.
inline CrossCheck check_sums_vs_oracle(double tol = 1e-10) {
    CrossCheck c{"paper-sums vs oracle", true, 0.0, ""};
    for (const auto& variant : validation_variants()) {
        for (double eta : validation_etas()) {
            for (double p : validation_dark_ps()) {
                DetectorSpec det{eta, p, 0.0};
                for (double t : validation_ts()) {
                    auto a = qber_paper_sums(variant, det, t);
                    auto b = qber_oracle(variant, det, t);
                    if (a.qber_defined != b.qber_defined) {
                        c.pass = false;
                        c.detail = "sentinel mismatch";
                        continue;
                    }
                    double worst = std::max(
                        {rel_diff(a.sift_rate, b.sift_rate), rel_diff(a.error_rate, b.error_rate),
                         a.qber_defined ? rel_diff(a.qber, b.qber) : 0.0});
                    if (worst > c.worst) {
                        c.worst = worst;
                        c.detail = std::string(protocol_name(variant.protocol)) +
                                   " d=" + std::to_string(variant.copy.d) +
                                   " m=" + std::to_string(variant.copy.m) +
                                   " eta=" + std::to_string(eta) + " p=" + std::to_string(p);
                    }
                }
            }
        }
    }
    if (c.worst > tol) c.pass = false;
    return c;
}

/// enumeration vs closed-form group distributions over the (eta, p) grid.
inline CrossCheck check_enum_vs_closed_forms(double tol = 1e-14) {
    CrossCheck c{"enumeration vs closed forms", true, 0.0, ""};
    auto compare = [&](const GroupDistribution& a, const GroupDistribution& b, const char* what) {
        double worst = std::max({std::fabs(a.p_out0 - b.p_out0), std::fabs(a.p_out1 - b.p_out1),
                                 std::fabs(a.p_ineff - b.p_ineff)});
        if (worst > c.worst) {
            c.worst = worst;
            c.detail = what;
        }
    };
    std::vector<double> etas = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    std::vector<double> ps = {0.0, 1e-6, 1e-4, 1e-2, 0.3};
    for (double eta : etas) {
        for (double p : ps) {
            DetectorSpec det{eta, p, 0.0};
            for (auto sc : {QutritScenario::Transmitted, QutritScenario::LostAuxiliary,
                            QutritScenario::Empty})
                compare(group_outcome_enum(qutrit_group(sc), det), qutrit_single_probs(det, sc),
                        "qutrit");
            for (auto sc : {Scenario::Transmitted, Scenario::Lost}) {
                compare(group_outcome_enum(qubit_singleton_group(sc), det),
                        qubit_group_probs(det, QubitGroupKind::Singleton, sc), "qubit singleton");
                compare(group_outcome_enum(qubit_pair_group(sc), det),
                        qubit_group_probs(det, QubitGroupKind::CopyPair, sc), "qubit pair");
            }
            auto clicks = tf_single_probs(det);
            auto right = group_outcome_enum(tf_side_group(0, true), det);
            auto dark = group_outcome_enum(tf_side_group(1, false), det);
            GroupDistribution right_ref{clicks.signal, 0.0, 1.0 - clicks.signal};
            GroupDistribution dark_ref{0.0, clicks.dark, 1.0 - clicks.dark};
            compare(right, right_ref, "tf signal side");
            compare(dark, dark_ref, "tf dark side");
        }
    }
    if (c.worst > tol) c.pass = false;
    return c;
}

/// Monte Carlo vs oracle: 99% CI containment at a short-distance point per
/// variant (configs chosen so error events actually occur at this scale).
inline CrossCheck check_mc_vs_oracle(std::uint64_t trials = 200'000, std::uint64_t seed = 42,
                                     unsigned workers = 0) {
    CrossCheck c{"montecarlo vs oracle", true, 0.0, ""};
    const DetectorSpec det{0.59, 4.6e-4, 0.0};
    const double t = transmittance({0.2, 50.0});
    const std::vector<ProtocolVariant> variants = {
        {Protocol::QubitBB84, {1, 1}},
        {Protocol::QutritBB84, {2, 1}},
        {Protocol::TwinField, {2, 1}},
    };
    for (const auto& variant : variants) {
        auto oracle = qber_oracle(variant, det, t);
        auto est = mc_estimate(variant, det, t, {trials, seed, true, workers});
        auto ci = qber_ci99(est, variant, t);
        if (!(oracle.qber >= ci.lo && oracle.qber <= ci.hi)) {
            c.pass = false;
            c.detail = std::string(protocol_name(variant.protocol)) + ": oracle qber " +
                       std::to_string(oracle.qber) + " outside [" + std::to_string(ci.lo) + ", " +
                       std::to_string(ci.hi) + "]";
        }
        if (est.report.qber_defined)
            c.worst = std::max(c.worst, std::fabs(est.report.qber - oracle.qber));
    }
    return c;
}

inline CrossValidation cross_validate(std::uint64_t mc_trials = 200'000, std::uint64_t mc_seed = 42,
                                      unsigned workers = 0) {
    CrossValidation v;
    v.checks.push_back(check_enum_vs_closed_forms());
    v.checks.push_back(check_sums_vs_oracle());
    v.checks.push_back(check_mc_vs_oracle(mc_trials, mc_seed, workers));
    return v;
}

}  // namespace qkdcopy
