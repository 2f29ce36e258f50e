#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <thread>
#include <vector>

#include "qkdcopy/exact_oracle.hpp"
#include "qkdcopy/protocol_model.hpp"
#include "qkdcopy/types.hpp"

namespace qkdcopy {

/// Counter-based per-trial random stream: the state is derived from
/// (seed, trial index) alone, so worker partitioning cannot change any draw.
class TrialRng {
  public:
    TrialRng(std::uint64_t seed, std::uint64_t trial) {
        state_ = mix(seed ^ mix(trial + 0x9E3779B97F4A7C15ull));
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix(state_);
    }

    /// Uniform double in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return next_double() < p; }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }
    std::uint64_t state_ = 0;
};

struct McConfig {
    std::uint64_t trials = 1'000'000;
    std::uint64_t seed = 1;
    bool stratified = true;
    unsigned workers = 0;  // 0 = hardware concurrency

    void validate() const {
        if (trials < 1) throw std::invalid_argument("McConfig: trials must be >= 1");
    }
};

enum class PulseOutcome { Keep0, Keep1, Discard };

namespace detail {

inline std::vector<GroupSpec> scenario_groups(const ProtocolVariant& variant, Scenario scenario) {
    const int d = variant.copy.d;
    std::vector<GroupSpec> groups;
    switch (variant.protocol) {
        case Protocol::QutritBB84:
            if (scenario == Scenario::Transmitted) {
                groups.assign(d + 1, qutrit_group(QutritScenario::Transmitted));
            } else {
                groups.push_back(qutrit_group(QutritScenario::Empty));
                groups.insert(groups.end(), d, qutrit_group(QutritScenario::LostAuxiliary));
            }
            break;
        case Protocol::QubitBB84:
            groups.push_back(qubit_singleton_group(scenario));
            groups.insert(groups.end(), d, qubit_pair_group(scenario));
            break;
        case Protocol::TwinField: {
            bool interfered = scenario == Scenario::Transmitted;
            groups.insert(groups.end(), d + 1, tf_side_group(0, interfered));
            groups.insert(groups.end(), d + 1, tf_side_group(1, false));
            break;
        }
    }
    return groups;
}

}  // namespace detail

/// Simulate one pulse: draw every detector click (photon with eta, dark count
/// with p, independently), classify groups, apply the vote conditions.
inline PulseOutcome sample_pulse(const ProtocolVariant& variant, const DetectorSpec& det,
                                 Scenario scenario, TrialRng& rng) {
    const auto groups = detail::scenario_groups(variant, scenario);
    const int m = variant.copy.m;
    int count0 = 0, count1 = 0;
    for (const auto& group : groups) {
        int group_out = -2;
        for (const auto& meas : group.measurements) {
            int clicks = 0, out = kOtherOutcome;
            for (const auto& slot : meas) {
                bool photon = slot.signal && rng.bernoulli(det.eta);
                bool dark = rng.bernoulli(det.dark_p);
                if (photon || dark) {
                    ++clicks;
                    out = slot.outcome;
                }
            }
            int o = clicks == 1 ? out : kOtherOutcome;
            if (o == kOtherOutcome || (group_out != -2 && o != group_out)) {
                group_out = kOtherOutcome;
                break;
            }
            group_out = o;
        }
        if (group_out == 0) ++count0;
        if (group_out == 1) ++count1;
    }
    if (count0 >= m && count1 < m) return PulseOutcome::Keep0;
    if (count1 >= m && count0 < m) return PulseOutcome::Keep1;
    return PulseOutcome::Discard;
}

/// Per-branch tallies; merging is plain addition, so sharding across workers
/// is associative and order-independent.
struct BranchCounts {
    std::uint64_t trials = 0;
    std::uint64_t keep0 = 0;
    std::uint64_t keep1 = 0;

    BranchCounts& operator+=(const BranchCounts& o) {
        trials += o.trials;
        keep0 += o.keep0;
        keep1 += o.keep1;
        return *this;
    }
};

struct McEstimate {
    RateReport report;
    double se_sift = 0.0;
    double se_error = 0.0;
    double se_qber = 0.0;
    bool se_degenerate = false;  // too few events for meaningful errors
    bool stratified = true;
    std::array<BranchCounts, 2> branches{};  // [transmitted, lost]; raw mode uses both too

    /// 99% confidence interval on the QBER, robust to zero observed error
    /// events (Wilson bounds on the per-branch error probabilities).
    struct Interval {
        double lo = 0.0;
        double hi = 1.0;
    };
    Interval qber_ci99(double prefactor, double w_trans, double w_loss) const {
        constexpr double z = 2.5758293035489004;  // 99% two-sided normal quantile
        auto wilson = [](std::uint64_t x, std::uint64_t n, double zz) {
            Interval iv;
            if (n == 0) return iv;
            double nn = static_cast<double>(n);
            double ph = static_cast<double>(x) / nn;
            double denom = 1.0 + zz * zz / nn;
            double center = ph + zz * zz / (2.0 * nn);
            double half = zz * std::sqrt(ph * (1.0 - ph) / nn + zz * zz / (4.0 * nn * nn));
            iv.lo = std::max(0.0, (center - half) / denom);
            iv.hi = std::min(1.0, (center + half) / denom);
            return iv;
        };
        const double w[2] = {w_trans, w_loss};
        double err_lo = 0.0, err_hi = 0.0;
        for (int b = 0; b < 2; ++b) {
            auto iv = wilson(branches[b].keep1, branches[b].trials, z);
            err_lo += w[b] * iv.lo;
            err_hi += w[b] * iv.hi;
        }
        err_lo *= prefactor;
        err_hi *= prefactor;
        double sift_lo = std::max(report.sift_rate - z * se_sift, 0.0);
        double sift_hi = report.sift_rate + z * se_sift;
        Interval iv;
        iv.lo = sift_hi > 0.0 ? std::max(0.0, err_lo / sift_hi) : 0.0;
        iv.hi = sift_lo > 0.0 ? std::min(1.0, err_hi / sift_lo) : 1.0;
        return iv;
    }
};

namespace detail {

inline BranchCounts run_range(const ProtocolVariant& variant, const DetectorSpec& det,
                              Scenario scenario, std::uint64_t seed, std::uint64_t begin,
                              std::uint64_t end) {
    BranchCounts c;
    for (std::uint64_t i = begin; i < end; ++i) {
        TrialRng rng(seed, i);
        auto out = sample_pulse(variant, det, scenario, rng);
        ++c.trials;
        if (out == PulseOutcome::Keep0) ++c.keep0;
        if (out == PulseOutcome::Keep1) ++c.keep1;
    }
    return c;
}

/// Raw (unstratified) trials draw the channel branch from the trial's own
/// stream; counts still land in per-branch bins.
inline std::array<BranchCounts, 2> run_range_raw(const ProtocolVariant& variant,
                                                 const DetectorSpec& det, double p_trans,
                                                 std::uint64_t seed, std::uint64_t begin,
                                                 std::uint64_t end) {
    std::array<BranchCounts, 2> c{};
    for (std::uint64_t i = begin; i < end; ++i) {
        TrialRng rng(seed, i);
        Scenario sc = rng.bernoulli(p_trans) ? Scenario::Transmitted : Scenario::Lost;
        int b = sc == Scenario::Transmitted ? 0 : 1;
        auto out = sample_pulse(variant, det, sc, rng);
        ++c[b].trials;
        if (out == PulseOutcome::Keep0) ++c[b].keep0;
        if (out == PulseOutcome::Keep1) ++c[b].keep1;
    }
    return c;
}

inline unsigned resolve_workers(unsigned workers, std::uint64_t n) {
    unsigned hw = std::thread::hardware_concurrency();
    if (workers == 0) workers = hw ? hw : 1;
    return static_cast<unsigned>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(n, 1)));
}

template <typename Fn>
inline void parallel_ranges(std::uint64_t begin, std::uint64_t end, unsigned workers, Fn fn) {
    workers = resolve_workers(workers, end - begin);
    std::uint64_t n = end - begin;
    std::vector<std::thread> threads;
    std::uint64_t chunk = n / workers, rem = n % workers;
    std::uint64_t at = begin;
    for (unsigned w = 0; w < workers; ++w) {
        std::uint64_t len = chunk + (w < rem ? 1 : 0);
        threads.emplace_back(fn, w, at, at + len);
        at += len;
    }
    for (auto& th : threads) th.join();
}

}  // namespace detail

/// Monte Carlo estimate of the rate report. Deterministic for a given
/// (seed, trials) regardless of worker count. Stratified mode splits trials
/// evenly between the transmitted and lost branches and reweights with the
/// exact branch probabilities, so rare long-distance events remain observable.
inline McEstimate mc_estimate(const ProtocolVariant& variant, const DetectorSpec& det, double t,
                              const McConfig& cfg) {
    variant.validate();
    det.validate();
    cfg.validate();

    const bool tf = variant.protocol == Protocol::TwinField;
    const double prefactor = tf ? 2.0 / kTfSiftDivisor : 0.5;
    double w_trans, w_loss;
    if (tf) {
        auto w = tf_branch_weights(t);
        w_trans = w.interfered;
        w_loss = w.not_interfered;
    } else {
        w_trans = t;
        w_loss = 1.0 - t;
    }

    McEstimate est;
    est.stratified = cfg.stratified;

    if (cfg.stratified) {
        std::uint64_t n_trans = (cfg.trials + 1) / 2;
        std::uint64_t n_loss = cfg.trials / 2;
        for (int b = 0; b < 2; ++b) {
            Scenario sc = b == 0 ? Scenario::Transmitted : Scenario::Lost;
            std::uint64_t begin = b == 0 ? 0 : n_trans;
            std::uint64_t end = b == 0 ? n_trans : n_trans + n_loss;
            std::vector<BranchCounts> parts(detail::resolve_workers(cfg.workers, end - begin));
            detail::parallel_ranges(begin, end, cfg.workers,
                                    [&](unsigned w, std::uint64_t lo, std::uint64_t hi) {
                                        parts[w] = detail::run_range(variant, det, sc, cfg.seed, lo, hi);
                                    });
            for (const auto& p : parts) est.branches[b] += p;
        }
    } else {
        std::vector<std::array<BranchCounts, 2>> parts(detail::resolve_workers(cfg.workers, cfg.trials));
        detail::parallel_ranges(0, cfg.trials, cfg.workers,
                                [&](unsigned w, std::uint64_t lo, std::uint64_t hi) {
                                    parts[w] = detail::run_range_raw(variant, det, w_trans, cfg.seed, lo, hi);
                                });
        for (const auto& p : parts) {
            est.branches[0] += p[0];
            est.branches[1] += p[1];
        }
    }

    // Weighted-mean rates with multinomial variances per branch. In raw mode
    // each trial is a plain draw, so the "branches" collapse to one pooled
    // sample with unit weight.
    double sift = 0.0, err = 0.0, var_sift = 0.0, var_err = 0.0, cov = 0.0;
    if (cfg.stratified) {
        const double w[2] = {w_trans, w_loss};
        for (int b = 0; b < 2; ++b) {
            const auto& c = est.branches[b];
            if (c.trials == 0) continue;
            double n = static_cast<double>(c.trials);
            double ps = static_cast<double>(c.keep0 + c.keep1) / n;
            double pe = static_cast<double>(c.keep1) / n;
            sift += w[b] * ps;
            err += w[b] * pe;
            var_sift += w[b] * w[b] * ps * (1.0 - ps) / n;
            var_err += w[b] * w[b] * pe * (1.0 - pe) / n;
            cov += w[b] * w[b] * pe * (1.0 - ps) / n;
        }
    } else {
        BranchCounts all = est.branches[0];
        all += est.branches[1];
        double n = static_cast<double>(all.trials);
        double ps = static_cast<double>(all.keep0 + all.keep1) / n;
        double pe = static_cast<double>(all.keep1) / n;
        sift = ps;
        err = pe;
        var_sift = ps * (1.0 - ps) / n;
        var_err = pe * (1.0 - pe) / n;
        cov = pe * (1.0 - ps) / n;
    }
    sift *= prefactor;
    err *= prefactor;
    var_sift *= prefactor * prefactor;
    var_err *= prefactor * prefactor;
    cov *= prefactor * prefactor;

    est.report = RateReport::make(sift, err, RatePath::MonteCarlo);
    est.se_sift = std::sqrt(std::max(var_sift, 0.0));
    est.se_error = std::sqrt(std::max(var_err, 0.0));
    if (est.report.qber_defined) {
        double q = est.report.qber;
        double var_q;
        if (err > 0.0) {
            var_q = q * q * (var_err / (err * err) + var_sift / (sift * sift) -
                             2.0 * cov / (err * sift));
        } else {
            var_q = var_err / (sift * sift);
        }
        est.se_qber = std::sqrt(std::max(var_q, 0.0));
    }
    std::uint64_t total_kept = est.branches[0].keep0 + est.branches[0].keep1 +
                               est.branches[1].keep0 + est.branches[1].keep1;
    est.se_degenerate = cfg.trials < 2 || total_kept < 2;
    return est;
}

/// Convenience: the 99% CI with the branch weighting this estimate used.
inline McEstimate::Interval qber_ci99(const McEstimate& est, const ProtocolVariant& variant,
                                      double t) {
    const bool tf = variant.protocol == Protocol::TwinField;
    const double prefactor = tf ? 2.0 / kTfSiftDivisor : 0.5;
    if (est.stratified) {
        if (tf) {
            auto w = tf_branch_weights(t);
            return est.qber_ci99(prefactor, w.interfered, w.not_interfered);
        }
        return est.qber_ci99(prefactor, t, 1.0 - t);
    }
    // raw mode: branch counts already carry the channel draw; weight by the
    // realized branch fractions
    double n = static_cast<double>(est.branches[0].trials + est.branches[1].trials);
    return est.qber_ci99(prefactor, est.branches[0].trials / n, est.branches[1].trials / n);
}

}  // namespace qkdcopy
