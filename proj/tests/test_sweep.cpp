#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qkdcopy/sweep.hpp"

using namespace qkdcopy;

namespace {
const DetectorSpec kUpconversion{0.59, 4.6e-4, 0.0};
const DetectorSpec kInGaAs{0.275, 1.36e-6, 0.0};

struct AnchorCfg {
    ProtocolVariant variant;
    DetectorSpec det;
    double expected_km;
};

const std::vector<AnchorCfg> kAnchors = {
    {{Protocol::QubitBB84, {0, 1}}, kUpconversion, 112.9},
    {{Protocol::QubitBB84, {0, 1}}, kInGaAs, 222.8},
    {{Protocol::QubitBB84, {4, 3}}, kUpconversion, 451.9},
    {{Protocol::QutritBB84, {8, 5}}, kUpconversion, 763.5},
    {{Protocol::TwinField, {0, 1}}, kUpconversion, 255.9},
    {{Protocol::TwinField, {8, 5}}, kInGaAs, 2553.4},
};
}  // namespace

TEST_CASE("near-zero dark counts give a flat near-zero sweep") {
    SweepSpec spec{{Protocol::QubitBB84, {0, 1}}, {1.0, 1e-30}, 0.2, 0.0, 100.0, 10.0, 0.11,
                   RatePath::PaperSums};
    auto res = distance_sweep(spec);
    REQUIRE(res.rows.size() == 11);
    for (const auto& row : res.rows) CHECK(row.qber < 1e-6);
}

TEST_CASE("single-point grid equals a direct qber call") {
    SweepSpec spec{{Protocol::QutritBB84, {8, 5}}, kUpconversion, 0.2, 300.0, 300.0 + 1.0, 10.0,
                   0.11, RatePath::PaperSums};
    auto res = distance_sweep(spec);
    REQUIRE(res.rows.size() == 1);
    auto direct = qber_paper_sums(spec.variant, spec.det, transmittance({0.2, 300.0}));
    CHECK(res.rows[0].qber == direct.qber);
    CHECK(res.rows[0].sift_rate == direct.sift_rate);
}

TEST_CASE("empty effective grid yields no rows") {
    SweepSpec spec{{Protocol::QubitBB84, {0, 1}}, kUpconversion, 0.2, 100.0, 100.0, 10.0, 0.11,
                   RatePath::PaperSums};
    auto res = distance_sweep(spec);
    CHECK(res.rows.empty());
    CHECK(res.degenerate_points == 0);
}

TEST_CASE("qutrit d=8 m=5 upconversion crosses 0.11 beyond 700 km") {
    SweepSpec spec{{Protocol::QutritBB84, {8, 5}}, kUpconversion, 0.2, 0.0, 800.0, 10.0, 0.11,
                   RatePath::PaperSums};
    auto res = distance_sweep(spec);
    double crossing = 0.0;
    for (const auto& row : res.rows) {
        if (row.qber >= 0.11) {
            crossing = row.distance_km;
            break;
        }
    }
    CHECK(crossing > 700.0);
}

TEST_CASE("sweep rows are ordered and monotone on acceptance configurations") {
    for (const auto& cfg : kAnchors) {
        SweepSpec spec{cfg.variant, cfg.det, 0.2, 0.0, cfg.expected_km * 1.2,
                       cfg.expected_km / 25.0, 0.11, RatePath::PaperSums};
        auto res = distance_sweep(spec);  // throws on any monotonicity violation
        REQUIRE(res.rows.size() > 10);
        for (std::size_t i = 1; i < res.rows.size(); ++i) {
            CHECK(res.rows[i].distance_km > res.rows[i - 1].distance_km);
            CHECK(res.rows[i].qber >= res.rows[i - 1].qber * (1.0 - 1e-9) - 1e-15);
        }
    }
}

TEST_CASE("max_distance hits the configured anchors") {
    for (const auto& cfg : kAnchors) {
        auto res = max_distance(cfg.variant, cfg.det, 0.2, 0.11, RatePath::PaperSums);
        REQUIRE(res.ok);
        CHECK(res.distance_km == doctest::Approx(cfg.expected_km).epsilon(1e-3));
    }
}

TEST_CASE("bisection bracket: threshold crossed within 1 km of the result") {
    for (const auto& cfg : kAnchors) {
        auto res = max_distance(cfg.variant, cfg.det, 0.2, 0.11, RatePath::PaperSums);
        REQUIRE(res.ok);
        double below = qber_paper_sums(cfg.variant, cfg.det,
                                       transmittance({0.2, res.distance_km - 1.0})).qber;
        double above = qber_paper_sums(cfg.variant, cfg.det,
                                       transmittance({0.2, res.distance_km + 1.0})).qber;
        CHECK(below < 0.11);
        CHECK(above >= 0.11);
    }
}

TEST_CASE("max_distance is path invariant between the two exact routes") {
    for (const auto& cfg : kAnchors) {
        auto sums = max_distance(cfg.variant, cfg.det, 0.2, 0.11, RatePath::PaperSums);
        auto oracle = max_distance(cfg.variant, cfg.det, 0.2, 0.11, RatePath::Oracle);
        REQUIRE(sums.ok);
        REQUIRE(oracle.ok);
        CHECK(std::fabs(sums.distance_km - oracle.distance_km) <= 0.2);
    }
}

TEST_CASE("unreachable threshold is a tagged failure") {
    // noisy detector: qber already above threshold at zero distance
    auto res = max_distance({Protocol::QubitBB84, {0, 1}}, {0.1, 0.3}, 0.2, 0.11,
                            RatePath::PaperSums);
    CHECK_FALSE(res.ok);
    CHECK(res.reason.find("threshold-unreachable") != std::string::npos);

    // perfect detector: threshold never reached
    auto never = max_distance({Protocol::QubitBB84, {0, 1}}, {1.0, 0.0}, 0.2, 0.11,
                              RatePath::PaperSums);
    CHECK_FALSE(never.ok);
}
