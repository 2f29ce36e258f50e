#pragma once

#include <cmath>

#include "qkdcopy/binomial.hpp"
#include "qkdcopy/protocol_model.hpp"
#include "qkdcopy/types.hpp"

namespace qkdcopy {

namespace detail {

/// Core double summation shared by the vote-count probabilities:
///   sum_{k=kmin}^{n} C(n,k) a^k sum_{i=0}^{min(icap, n-k)} C(n-k,i) b^i e^{n-k-i}
/// where (a, b, e) is a categorical group distribution. Negative icap or
/// kmin > n yield zero.
inline double vote_sum(int n, double a, double b, double e, int kmin, int icap) {
    if (kmin > n || icap < 0) return 0.0;
    if (kmin < 0) kmin = 0;
    KahanSum outer;
    for (int k = kmin; k <= n; ++k) {
        int itop = std::min(icap, n - k);
        KahanSum inner;
        for (int i = 0; i <= itop; ++i)
            inner.add(choose(n - k, i) * std::pow(b, i) * std::pow(e, n - k - i));
        outer.add(choose(n, k) * std::pow(a, k) * inner.value());
    }
    return outer.value();
}

/// Probability that, among n iid groups with outcome distribution g plus one
/// extra group with distribution extra, at least m groups report "win" while
/// fewer than m report "lose". The extra group's three terms mirror the
/// supplement's leading factors: it may itself report win, lose, or nothing.
inline double keep_with_extra(int n, const GroupDistribution& g, const GroupDistribution& extra,
                              int m, bool win_is_0) {
    double a = win_is_0 ? g.p_out0 : g.p_out1;
    double b = win_is_0 ? g.p_out1 : g.p_out0;
    double xa = win_is_0 ? extra.p_out0 : extra.p_out1;
    double xb = win_is_0 ? extra.p_out1 : extra.p_out0;
    double e = g.p_ineff;
    KahanSum s;
    s.add(xa * vote_sum(n, a, b, e, m - 1, m - 1));
    s.add(xb * vote_sum(n, a, b, e, m, m - 2));
    s.add(extra.p_ineff * vote_sum(n, a, b, e, m, m - 1));
    return s.value();
}

/// Same condition over n iid groups with no extra group.
inline double keep_iid(int n, const GroupDistribution& g, int m, bool win_is_0) {
    double a = win_is_0 ? g.p_out0 : g.p_out1;
    double b = win_is_0 ? g.p_out1 : g.p_out0;
    return vote_sum(n, a, b, g.p_ineff, m, m - 1);
}

}  // namespace detail

/// QBER via the summation formulas, with exact single/group probabilities
/// substituted for the first-order reductions.
inline RateReport qber_paper_sums(const ProtocolVariant& variant, const DetectorSpec& det,
                                  double t) {
    variant.validate();
    det.validate();
    const int d = variant.copy.d;
    const int m = variant.copy.m;

    double sift = 0.0, err = 0.0;
    switch (variant.protocol) {
        case Protocol::QutritBB84: {
            auto gt = qutrit_single_probs(det, QutritScenario::Transmitted);
            auto gn = qutrit_single_probs(det, QutritScenario::LostAuxiliary);
            auto ge = qutrit_single_probs(det, QutritScenario::Empty);
            double trans0 = detail::keep_iid(d + 1, gt, m, true);
            double trans1 = detail::keep_iid(d + 1, gt, m, false);
            double loss0 = detail::keep_with_extra(d, gn, ge, m, true);
            double loss1 = detail::keep_with_extra(d, gn, ge, m, false);
            sift = 0.5 * (t * (trans0 + trans1) + (1.0 - t) * (loss0 + loss1));
            err = 0.5 * (t * trans1 + (1.0 - t) * loss1);
            break;
        }
        case Protocol::QubitBB84: {
            auto pair_t = qubit_group_probs(det, QubitGroupKind::CopyPair, Scenario::Transmitted);
            auto pair_n = qubit_group_probs(det, QubitGroupKind::CopyPair, Scenario::Lost);
            auto single_t = qubit_group_probs(det, QubitGroupKind::Singleton, Scenario::Transmitted);
            auto single_n = qubit_group_probs(det, QubitGroupKind::Singleton, Scenario::Lost);
            double trans0 = detail::keep_with_extra(d, pair_t, single_t, m, true);
            double trans1 = detail::keep_with_extra(d, pair_t, single_t, m, false);
            double loss0 = detail::keep_with_extra(d, pair_n, single_n, m, true);
            double loss1 = detail::keep_with_extra(d, pair_n, single_n, m, false);
            sift = 0.5 * (t * (trans0 + trans1) + (1.0 - t) * (loss0 + loss1));
            err = 0.5 * (t * trans1 + (1.0 - t) * loss1);
            break;
        }
        case Protocol::TwinField: {
            auto clicks = tf_single_probs(det);
            auto w = tf_branch_weights(t);
            double tail_signal = binom_tail_upper(d + 1, m, clicks.signal);
            double tail_dark = binom_tail_upper(d + 1, m, clicks.dark);
            double trans_right = tail_signal * (1.0 - tail_dark);
            double trans_wrong = tail_dark * (1.0 - tail_signal);
            double loss_side = tail_dark * (1.0 - tail_dark);
            double pre = 2.0 / kTfSiftDivisor;
            sift = pre * (w.interfered * (trans_right + trans_wrong) +
                          w.not_interfered * 2.0 * loss_side);
            err = pre * (w.interfered * trans_wrong + w.not_interfered * loss_side);
            break;
        }
    }
    return RateReport::make(sift, err, RatePath::PaperSums);
}

/// QBER via the closed-form approximations, evaluated as printed. The ratio
/// t/p^m (sqrt(t)/p^m for twin-field) is formed in log space so that extreme
/// distances do not underflow.
inline double qber_approx(const ProtocolVariant& variant, const DetectorSpec& det, double t) {
    variant.validate();
    det.validate();
    const int d = variant.copy.d;
    const int m = variant.copy.m;
    const double eta = det.eta, p = det.dark_p;
    if (p <= 0.0) return 0.0;

    switch (variant.protocol) {
        case Protocol::QutritBB84: {
            double ratio = t > 0.0 ? std::exp(std::log(t) - m * std::log(p)) : 0.0;
            double num = (choose(d, m - 1) + choose(d, m) * (1.0 - eta)) *
                         std::pow(1.0 - eta, m - 1);
            KahanSum s;
            for (int k = m; k <= d + 1; ++k)
                s.add(choose(d + 1, k) * std::pow(eta, k) * std::pow(1.0 - eta, d + 1 - k));
            double den = ratio * s.value() + 2.0 * num;
            if (std::isinf(ratio)) return 0.0;
            return den > 0.0 ? num / den : std::numeric_limits<double>::quiet_NaN();
        }
        case Protocol::QubitBB84: {
            double ratio = t > 0.0 ? std::exp(std::log(t) - m * std::log(p)) : 0.0;
            double num = (choose(d, m - 1) + choose(d, m) * eta * (1.0 - eta)) *
                         std::pow(eta * (1.0 - eta), m - 1);
            double eta2 = eta * eta;
            KahanSum s;
            s.add(choose(d, m - 1) * std::pow(eta, 2 * m - 1) * std::pow(1.0 - eta2, d - m + 1));
            for (int k = m; k <= d; ++k)
                s.add(choose(d, k) * std::pow(eta2, k) * std::pow(1.0 - eta2, d - k));
            double den = ratio * s.value() + 2.0 * num;
            if (std::isinf(ratio)) return 0.0;
            return den > 0.0 ? num / den : std::numeric_limits<double>::quiet_NaN();
        }
        case Protocol::TwinField: {
            double ratio = t > 0.0 ? std::exp(0.5 * std::log(t) - m * std::log(p)) : 0.0;
            KahanSum s;
            for (int k = m; k <= d + 1; ++k)
                s.add(choose(d + 1, k) * std::pow(eta, m) * std::pow(1.0 - eta, d + 1 - k));
            if (std::isinf(ratio)) return 0.0;
            return 1.0 / (2.0 * ratio * s.value() / choose(d + 1, m) + 2.0);
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

/// RateReport wrapper for the approximation path (rates themselves are only
/// meaningful on the exact paths; sift/error are left at the approximation's
/// implied ratio scale).
inline RateReport qber_approx_report(const ProtocolVariant& variant, const DetectorSpec& det,
                                     double t) {
    double q = qber_approx(variant, det, t);
    RateReport r;
    r.path = RatePath::Approx;
    r.qber = q;
    r.qber_defined = !std::isnan(q);
    r.sift_rate = std::numeric_limits<double>::quiet_NaN();
    r.error_rate = std::numeric_limits<double>::quiet_NaN();
    return r;
}

/// Upper binomial tail P(X >= d+2-m), X ~ Binomial(d+1, p_opt): probability
/// that enough measurements err to flip or spoil the vote.
inline double whole_measurement_error(int d, int m, double p_opt) {
    CopyConfig{d, m}.validate();
    return binom_tail_upper(d + 1, d + 2 - m, p_opt);
}

/// 1 - P(failures >= d+2-m), failures ~ Binomial(d+1, 1-eta).
inline double whole_detective_efficiency(int d, int m, double eta) {
    CopyConfig{d, m}.validate();
    return 1.0 - binom_tail_upper(d + 1, d + 2 - m, 1.0 - eta);
}

}  // namespace qkdcopy
