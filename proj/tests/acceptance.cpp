// Acceptance suite: runs every headline criterion and prints one line each.
// Exit status is nonzero if any criterion fails.

#include <bit>
#include <cstdio>
#include <string>
#include <vector>

#include "qkdcopy/analytic_rates.hpp"
#include "qkdcopy/montecarlo.hpp"
#include "qkdcopy/sweep.hpp"
#include "qkdcopy/validate.hpp"

using namespace qkdcopy;

namespace {

int g_failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] %s: %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    if (!pass) ++g_failures;
}

const DetectorSpec kUpconversion{0.59, 4.6e-4, 0.0};
const DetectorSpec kInGaAs{0.275, 1.36e-6, 0.0};

double tail_by_enumeration(int n, int kmin, double q) {
    double total = 0.0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (std::popcount(mask) < kmin) continue;
        double pr = 1.0;
        for (int i = 0; i < n; ++i) pr *= (mask >> i & 1u) ? q : 1.0 - q;
        total += pr;
    }
    return total;
}

void criterion1_whole_measurement_error() {
    double v = whole_measurement_error(8, 5, 0.015);
    double oracle = tail_by_enumeration(9, 5, 0.015);
    bool pass = v < 1e-7 && std::fabs(v - oracle) / oracle < 1e-10 &&
                std::fabs(v - 9.0988646942988633e-08) / v < 1e-10;
    report("1 whole-measurement-error d=8 m=5 p_opt=0.015", pass,
           "value=" + std::to_string(v * 1e8) + "e-8, bound 1e-7");
}

void criterion2_whole_efficiency() {
    double v = whole_detective_efficiency(8, 5, 0.59);
    double oracle = 1.0 - tail_by_enumeration(9, 5, 0.41);
    bool pass = v > 0.71 && std::fabs(v - oracle) < 1e-12 &&
                std::fabs(v - 0.71219097897233352) < 1e-12;
    report("2 whole-detective-efficiency d=8 m=5 eta=0.59", pass,
           "value=" + std::to_string(v) + ", bound 0.71");
}

struct DistanceClaim {
    std::string name;
    ProtocolVariant variant;
    DetectorSpec det;
    double claim_km;
    bool lower_bound_only;  // "over X km"
};

double solve_distance(const DistanceClaim& c, double threshold) {
    auto res = max_distance(c.variant, c.det, 0.2, threshold, RatePath::PaperSums);
    return res.ok ? res.distance_km : -1.0;
}

bool claim_holds(const DistanceClaim& c, double solved) {
    if (solved < 0.0) return false;
    if (c.lower_bound_only) return solved >= c.claim_km;
    return std::fabs(solved - c.claim_km) / c.claim_km <= 0.10;
}

void criterion3_baselines() {
    std::vector<DistanceClaim> claims = {
        {"qubit d0=0 upconversion", {Protocol::QubitBB84, {0, 1}}, kUpconversion, 105.0, false},
        {"qubit d0=0 InGaAs", {Protocol::QubitBB84, {0, 1}}, kInGaAs, 210.0, false},
    };
    for (const auto& c : claims) {
        double solved = solve_distance(c, 0.11);
        report("3 baseline " + c.name, claim_holds(c, solved),
               "solved=" + std::to_string(solved) + " km, claim " + std::to_string(c.claim_km) +
                   " km +/-10%");
    }
}

void criterion4_scheme_distances() {
    std::vector<DistanceClaim> claims = {
        {"qubit d0=4 m0=3 upconversion", {Protocol::QubitBB84, {4, 3}}, kUpconversion, 450.0, false},
        {"qutrit d=8 m=5 upconversion", {Protocol::QutritBB84, {8, 5}}, kUpconversion, 700.0, true},
        {"tf d=0 m=1 upconversion", {Protocol::TwinField, {0, 1}}, kUpconversion, 240.0, false},
        {"tf d=0 m=1 InGaAs", {Protocol::TwinField, {0, 1}}, kInGaAs, 450.0, false},
        {"tf d=8 m=5 upconversion", {Protocol::TwinField, {8, 5}}, kUpconversion, 1380.0, false},
        {"tf d=8 m=5 InGaAs", {Protocol::TwinField, {8, 5}}, kInGaAs, 2500.0, false},
    };

    bool all_at_default = true;
    for (const auto& c : claims) {
        double solved = solve_distance(c, 0.11);
        bool ok = claim_holds(c, solved);
        all_at_default = all_at_default && ok;
        report("4 distance " + c.name, ok,
               "solved=" + std::to_string(solved) + " km, claim " + std::to_string(c.claim_km) +
                   (c.lower_bound_only ? " km lower bound" : " km +/-10%"));
    }
    if (!all_at_default) {
        // fallback calibration sweep: report the threshold fitting most claims
        double best_threshold = 0.0;
        int best_hits = -1;
        for (double threshold : {0.05, 0.08, 0.15}) {
            int hits = 0;
            for (const auto& c : claims)
                if (claim_holds(c, solve_distance(c, threshold))) ++hits;
            if (hits > best_hits) {
                best_hits = hits;
                best_threshold = threshold;
            }
        }
        std::printf("        best-fit fallback threshold %.2f matches %d/%zu claims\n",
                    best_threshold, best_hits, claims.size());
    }

    // distance ordering must hold at every candidate threshold
    for (double threshold : {0.05, 0.08, 0.11, 0.15}) {
        std::vector<double> solved;
        for (const auto& c : claims) solved.push_back(solve_distance(c, threshold));
        bool ordered = solved[0] < solved[1] && solved[2] < solved[3] && solved[2] < solved[4] &&
                       solved[4] < solved[5] && solved[3] < solved[5];
        // m = 2..5 twin-field ladder for a representative low-p detector
        double prev = 0.0;
        bool ladder = true;
        for (int m = 2; m <= 5; ++m) {
            auto r = max_distance({Protocol::TwinField, {8, m}}, kInGaAs, 0.2, threshold,
                                  RatePath::PaperSums);
            ladder = ladder && r.ok && r.distance_km > prev;
            prev = r.ok ? r.distance_km : prev;
        }
        report("4 ordering at threshold " + std::to_string(threshold), ordered && ladder,
               ordered ? (ladder ? "all orderings hold" : "tf ladder violation")
                       : "claim ordering violation");
    }
}

void criterion5_cross_validation() {
    auto sums = check_sums_vs_oracle();
    report("5 paper-sums vs oracle on the (eta,p,t) grid", sums.pass,
           "worst rel diff=" + std::to_string(sums.worst) + " tol 1e-10 (" + sums.detail + ")");
    auto enums = check_enum_vs_closed_forms();
    report("5 enumeration vs closed forms", enums.pass,
           "worst abs diff=" + std::to_string(enums.worst) + " tol 1e-14");
}

void criterion6_dp_vs_bruteforce() {
    std::vector<GroupDistribution> pool = {
        {1.0, 0.0, 0.0},   {0.0, 1.0, 0.0},     {0.0, 0.0, 1.0},
        {0.5, 0.5, 0.0},   {0.25, 0.35, 0.40},  {0.9, 0.05, 0.05},
        {0.01, 0.01, 0.98}};
    double worst = 0.0;
    for (int n = 1; n <= 3; ++n) {
        std::vector<std::size_t> idx(n, 0);
        while (true) {
            std::vector<GroupDistribution> groups;
            for (int g = 0; g < n; ++g) groups.push_back(pool[idx[g]]);
            for (int m = 1; m <= 2; ++m) {
                auto dp = protocol_decision_dp(groups, m);
                // brute force over all 3^n outcome tuples
                long total = 1;
                for (int i = 0; i < n; ++i) total *= 3;
                double k0 = 0.0, k1 = 0.0;
                for (long code = 0; code < total; ++code) {
                    long c = code;
                    double pr = 1.0;
                    int c0 = 0, c1 = 0;
                    for (int i = 0; i < n; ++i) {
                        int o = c % 3;
                        c /= 3;
                        pr *= o == 0 ? groups[i].p_out0 : o == 1 ? groups[i].p_out1 : groups[i].p_ineff;
                        c0 += o == 0;
                        c1 += o == 1;
                    }
                    if (c0 >= m && c1 < m) k0 += pr;
                    if (c1 >= m && c0 < m) k1 += pr;
                }
                worst = std::max({worst, std::fabs(dp.keep0 - k0), std::fabs(dp.keep1 - k1)});
            }
            int g = 0;
            while (g < n && ++idx[g] == pool.size()) idx[g++] = 0;
            if (g == n) break;
        }
    }
    report("6 DP vs 3^n brute force (d+1<=3, m<=2)", worst <= 1e-15,
           "worst abs diff=" + std::to_string(worst));
}

void criterion7_montecarlo() {
    const double t = transmittance({0.2, 50.0});
    const std::vector<std::pair<std::string, ProtocolVariant>> variants = {
        {"qubit d0=1 m0=1", {Protocol::QubitBB84, {1, 1}}},
        {"qutrit d=2 m=1", {Protocol::QutritBB84, {2, 1}}},
        {"tf d=2 m=1", {Protocol::TwinField, {2, 1}}},
    };
    for (const auto& [name, variant] : variants) {
        auto oracle = qber_oracle(variant, kUpconversion, t);
        int covered = 0;
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            auto est = mc_estimate(variant, kUpconversion, t, {1'000'000, seed, true, 0});
            auto ci = qber_ci99(est, variant, t);
            if (oracle.qber >= ci.lo && oracle.qber <= ci.hi) ++covered;
        }
        report("7 MC 99% CI coverage " + name, covered >= 17,
               std::to_string(covered) + "/20 seeds cover the oracle qber");
    }
}

void criterion8_limits() {
    bool half_limit = true, zero_p = true, monotone = true;
    for (auto protocol : {Protocol::QubitBB84, Protocol::QutritBB84, Protocol::TwinField}) {
        ProtocolVariant v{protocol, {2, 2}};
        half_limit = half_limit &&
                     std::fabs(qber_approx(v, kUpconversion, 1e-120) - 0.5) < 1e-3;
        auto exact_deep = qber_paper_sums(v, kUpconversion, 1e-120);
        half_limit = half_limit && exact_deep.qber_defined &&
                     std::fabs(exact_deep.qber - 0.5) < 1e-2;
        auto rep = qber_paper_sums(v, {0.59, 0.0}, 0.3);
        zero_p = zero_p && rep.qber_defined && rep.qber == 0.0;
        try {
            SweepSpec spec{v, kUpconversion, 0.2, 0.0, 1500.0, 25.0, 0.11, RatePath::PaperSums};
            auto res = distance_sweep(spec);  // throws on monotonicity violation
            for (std::size_t i = 1; i < res.rows.size(); ++i)
                monotone = monotone && res.rows[i].qber >= res.rows[i - 1].qber * (1.0 - 1e-9) - 1e-15;
        } catch (const std::exception&) {
            monotone = false;
        }
    }
    report("8 limit: qber -> 1/2 as t -> 0", half_limit, "checked all variants");
    report("8 limit: qber = 0 when p = 0", zero_p, "checked all variants");
    report("8 limit: qber monotone along every sweep", monotone, "checked all variants");
}

}  // namespace

int main() {
    criterion1_whole_measurement_error();
    criterion2_whole_efficiency();
    criterion3_baselines();
    criterion4_scheme_distances();
    criterion5_cross_validation();
    criterion6_dp_vs_bruteforce();
    criterion7_montecarlo();
    criterion8_limits();
    std::printf("%s: %d failure(s)\n", g_failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
                g_failures);
    return g_failures == 0 ? 0 : 1;
}
