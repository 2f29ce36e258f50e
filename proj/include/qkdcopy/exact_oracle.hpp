#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qkdcopy/protocol_model.hpp"
#include "qkdcopy/types.hpp"

namespace qkdcopy {

/// One detector slot inside a measurement: which vote outcome it reports when
/// it is the only click (kOtherOutcome for the qutrit |2> detector), and
/// whether the scenario routes a real photon onto it.
struct DetectorSlot {
    int outcome = 0;
    bool signal = false;
};

inline constexpr int kOtherOutcome = -1;

using Measurement = std::vector<DetectorSlot>;

/// A measurement group. A group reports outcome o when every measurement in it
/// reports exactly one click and that click maps to the same o in {0, 1};
/// anything else is ineffective.
struct GroupSpec {
    std::vector<Measurement> measurements;
};

// --- group builders -------------------------------------------------------

inline GroupSpec qutrit_group(QutritScenario scenario) {
    Measurement meas = {{0, scenario == QutritScenario::Transmitted},
                        {1, false},
                        {kOtherOutcome, scenario == QutritScenario::LostAuxiliary}};
    return {{meas}};
}

inline GroupSpec qubit_singleton_group(Scenario scenario) {
    Measurement meas = {{0, scenario == Scenario::Transmitted}, {1, false}};
    return {{meas}};
}

inline GroupSpec qubit_pair_group(Scenario scenario) {
    if (scenario == Scenario::Transmitted) {
        Measurement meas = {{0, true}, {1, false}};
        return {{meas, meas}};
    }
    // under loss the pair's auxiliaries hold |0> and |1>
    Measurement b1 = {{0, true}, {1, false}};
    Measurement b2 = {{0, false}, {1, true}};
    return {{b1, b2}};
}

/// One twin-field side measurement: a single polarization detector whose click
/// votes for the given side (0 = right, 1 = wrong).
inline GroupSpec tf_side_group(int vote_outcome, bool signal) {
    Measurement meas = {{vote_outcome, signal}};
    return {{meas}};
}

// --- enumeration ----------------------------------------------------------

/// Outcome distribution of a group by exhaustive enumeration of every click
/// subset across all of its detectors.
inline GroupDistribution group_outcome_enum(const GroupSpec& spec, const DetectorSpec& det) {
    det.validate();
    std::vector<double> click_p;
    std::vector<int> outcome;
    std::vector<int> meas_of;
    for (std::size_t mi = 0; mi < spec.measurements.size(); ++mi) {
        for (const auto& slot : spec.measurements[mi]) {
            click_p.push_back(slot.signal ? det.eta + (1.0 - det.eta) * det.dark_p : det.dark_p);
            outcome.push_back(slot.outcome);
            meas_of.push_back(static_cast<int>(mi));
        }
    }
    const int n = static_cast<int>(click_p.size());
    const int n_meas = static_cast<int>(spec.measurements.size());

    GroupDistribution g{0.0, 0.0, 0.0};
    std::vector<int> meas_clicks(n_meas), meas_outcome(n_meas);
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        double prob = 1.0;
        std::fill(meas_clicks.begin(), meas_clicks.end(), 0);
        for (int i = 0; i < n; ++i) {
            if (mask & (1u << i)) {
                prob *= click_p[i];
                ++meas_clicks[meas_of[i]];
                meas_outcome[meas_of[i]] = outcome[i];
            } else {
                prob *= 1.0 - click_p[i];
            }
        }
        // classify: every measurement must report exactly one click mapping to
        // the same outcome in {0, 1}
        int group_out = -2;
        for (int mi = 0; mi < n_meas; ++mi) {
            int o = meas_clicks[mi] == 1 ? meas_outcome[mi] : kOtherOutcome;
            if (o == kOtherOutcome || (group_out != -2 && o != group_out)) {
                group_out = kOtherOutcome;
                break;
            }
            group_out = o;
        }
        if (group_out == 0)
            g.p_out0 += prob;
        else if (group_out == 1)
            g.p_out1 += prob;
        else
            g.p_ineff += prob;
    }
    return g;
}

// --- decision DP ----------------------------------------------------------

struct VoteDecision {
    double keep0 = 0.0;
    double keep1 = 0.0;
    double discard = 0.0;
};

/// Exact distribution of the vote decision over a sequence of independent
/// (not necessarily identical) groups, via a DP on (count0, count1) with both
/// counts saturating at m. Keeping requires one count to reach m while the
/// other stays below; both reaching m is a discard.
inline VoteDecision protocol_decision_dp(std::span<const GroupDistribution> groups, int m) {
    const int s = m + 1;
    std::vector<double> cur(s * s, 0.0), next(s * s, 0.0);
    cur[0] = 1.0;
    for (const auto& g : groups) {
        std::fill(next.begin(), next.end(), 0.0);
        for (int c0 = 0; c0 < s; ++c0) {
            for (int c1 = 0; c1 < s; ++c1) {
                double pr = cur[c0 * s + c1];
                if (pr == 0.0) continue;
                int u0 = std::min(c0 + 1, m);
                int u1 = std::min(c1 + 1, m);
                next[u0 * s + c1] += pr * g.p_out0;
                next[c0 * s + u1] += pr * g.p_out1;
                next[c0 * s + c1] += pr * g.p_ineff;
            }
        }
        cur.swap(next);
    }
    VoteDecision v;
    for (int c1 = 0; c1 < m; ++c1) v.keep0 += cur[m * s + c1];
    for (int c0 = 0; c0 < m; ++c0) v.keep1 += cur[c0 * s + m];
    v.discard = 1.0 - v.keep0 - v.keep1;
    return v;
}

// --- full oracle ----------------------------------------------------------

namespace detail {

inline VoteDecision decide_scenario(const ProtocolVariant& variant, const DetectorSpec& det,
                                    Scenario scenario) {
    const int d = variant.copy.d;
    std::vector<GroupDistribution> groups;
    switch (variant.protocol) {
        case Protocol::QutritBB84:
            if (scenario == Scenario::Transmitted) {
                groups.assign(d + 1, group_outcome_enum(qutrit_group(QutritScenario::Transmitted), det));
            } else {
                groups.push_back(group_outcome_enum(qutrit_group(QutritScenario::Empty), det));
                auto aux = group_outcome_enum(qutrit_group(QutritScenario::LostAuxiliary), det);
                groups.insert(groups.end(), d, aux);
            }
            break;
        case Protocol::QubitBB84: {
            groups.push_back(group_outcome_enum(qubit_singleton_group(scenario), det));
            auto pair = group_outcome_enum(qubit_pair_group(scenario), det);
            groups.insert(groups.end(), d, pair);
            break;
        }
        case Protocol::TwinField: {
            bool interfered = scenario == Scenario::Transmitted;
            auto right = group_outcome_enum(tf_side_group(0, interfered), det);
            auto wrong = group_outcome_enum(tf_side_group(1, false), det);
            groups.insert(groups.end(), d + 1, right);
            groups.insert(groups.end(), d + 1, wrong);
            break;
        }
    }
    return protocol_decision_dp(groups, variant.copy.m);
}

}  // namespace detail

/// Ground-truth QBER: scenario-weighted vote decisions assembled from the
/// enumerated group distributions and the decision DP.
inline RateReport qber_oracle(const ProtocolVariant& variant, const DetectorSpec& det, double t) {
    variant.validate();
    det.validate();
    auto trans = detail::decide_scenario(variant, det, Scenario::Transmitted);
    auto loss = detail::decide_scenario(variant, det, Scenario::Lost);

    double sift = 0.0, err = 0.0;
    if (variant.protocol == Protocol::TwinField) {
        auto w = tf_branch_weights(t);
        double pre = 2.0 / kTfSiftDivisor;
        sift = pre * (w.interfered * (trans.keep0 + trans.keep1) +
                      w.not_interfered * (loss.keep0 + loss.keep1));
        err = pre * (w.interfered * trans.keep1 + w.not_interfered * loss.keep1);
    } else {
        sift = 0.5 * (t * (trans.keep0 + trans.keep1) + (1.0 - t) * (loss.keep0 + loss.keep1));
        err = 0.5 * (t * trans.keep1 + (1.0 - t) * loss.keep1);
    }
    return RateReport::make(sift, err, RatePath::Oracle);
}

}  // namespace qkdcopy
