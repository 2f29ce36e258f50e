#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "qkdcopy/analytic_rates.hpp"
#include "qkdcopy/exact_oracle.hpp"
#include "qkdcopy/types.hpp"

namespace qkdcopy {

/// QBER through the selected computation path.
inline RateReport qber_by_path(const ProtocolVariant& variant, const DetectorSpec& det, double t,
                               RatePath path) {
    switch (path) {
        case RatePath::PaperSums: return qber_paper_sums(variant, det, t);
        case RatePath::Oracle: return qber_oracle(variant, det, t);
        case RatePath::Approx: return qber_approx_report(variant, det, t);
        case RatePath::MonteCarlo:
            throw std::invalid_argument("qber_by_path: montecarlo path needs an McConfig; use mc_estimate");
    }
    throw std::invalid_argument("qber_by_path: unknown path");
}

struct SweepSpec {
    ProtocolVariant variant;
    DetectorSpec det;
    double alpha = 0.2;
    double start_km = 0.0;
    double stop_km = 0.0;
    double step_km = 10.0;
    double threshold = 0.11;
    RatePath path = RatePath::PaperSums;

    void validate() const {
        variant.validate();
        det.validate();
        if (!(alpha >= 0.0)) throw std::invalid_argument("SweepSpec: alpha must be >= 0");
        if (!(step_km > 0.0)) throw std::invalid_argument("SweepSpec: step_km must be > 0");
        if (start_km > stop_km) throw std::invalid_argument("SweepSpec: start_km must be <= stop_km");
        if (!(threshold > 0.0 && threshold < 0.5))
            throw std::invalid_argument("SweepSpec: threshold must be in (0, 0.5)");
    }
};

struct SweepRow {
    double distance_km = 0.0;
    double transmittance = 0.0;
    double qber = 0.0;
    double sift_rate = 0.0;
    double error_rate = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    int degenerate_points = 0;  // grid points skipped for zero sift
};

/// One row per grid point, ordered by distance. The QBER must be nondecreasing
/// along the sweep; a violation beyond rounding noise is a hard failure.
inline SweepResult distance_sweep(const SweepSpec& spec) {
    spec.validate();
    SweepResult res;
    if (spec.start_km == spec.stop_km) return res;  // empty effective grid
    double prev_qber = -1.0;
    const long npts = static_cast<long>(std::floor((spec.stop_km - spec.start_km) / spec.step_km + 1e-9));
    for (long k = 0; k <= npts; ++k) {
        double l = spec.start_km + k * spec.step_km;
        double t = transmittance({spec.alpha, l});
        auto rep = qber_by_path(spec.variant, spec.det, t, spec.path);
        if (!rep.qber_defined) {
            ++res.degenerate_points;
            continue;
        }
        if (rep.qber < prev_qber * (1.0 - 1e-9) - 1e-15)
            throw std::logic_error("distance_sweep: qber decreased along the sweep at l=" +
                                   std::to_string(l));
        prev_qber = rep.qber;
        res.rows.push_back({l, t, rep.qber, rep.sift_rate, rep.error_rate});
    }
    return res;
}

struct MaxDistanceResult {
    bool ok = false;
    double distance_km = 0.0;
    std::string reason;
};

/// Largest distance at which the QBER stays at the threshold, by geometric
/// bracket growth from 100 km and bisection to 1e-6 in QBER, reported at
/// 0.1 km resolution.
inline MaxDistanceResult max_distance(const ProtocolVariant& variant, const DetectorSpec& det,
                                      double alpha, double threshold, RatePath path) {
    variant.validate();
    det.validate();
    if (!(threshold > 0.0 && threshold < 0.5))
        return {false, 0.0, "threshold must be in (0, 0.5)"};

    auto qber_at = [&](double l) {
        return qber_by_path(variant, det, transmittance({alpha, l}), path);
    };

    auto at_zero = qber_at(0.0);
    if (!at_zero.qber_defined) return {false, 0.0, "degenerate sift at zero distance"};
    if (at_zero.qber >= threshold) return {false, 0.0, "threshold-unreachable: qber at 0 km already exceeds threshold"};

    double lo = 0.0, hi = 100.0;
    constexpr double kMaxKm = 1e6;
    while (true) {
        auto rep = qber_at(hi);
        if (rep.qber_defined && rep.qber >= threshold) break;
        lo = hi;
        hi *= 2.0;
        if (hi > kMaxKm)
            return {false, 0.0, "threshold-unreachable: qber stays below threshold out to 1e6 km"};
    }

    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        auto rep = qber_at(mid);
        if (!rep.qber_defined) {  // push degenerate points toward shorter distance
            hi = mid;
            continue;
        }
        if (std::fabs(rep.qber - threshold) <= 1e-6) {
            lo = hi = mid;
            break;
        }
        (rep.qber < threshold ? lo : hi) = mid;
        if (hi - lo < 1e-4) break;
    }
    double l = 0.5 * (lo + hi);
    return {true, std::round(l * 10.0) / 10.0, ""};
}

}  // namespace qkdcopy
