#include <gtest/gtest.h>

#include <cmath>

#include <json.hpp>

#include "rtp/mixing.hpp"

using namespace rtp;

namespace {

MixingOptions small()
{
    MixingOptions o;
    o.replicas = 400;
    o.pilot_replicas = 16;
    o.worst_pairs = 2;
    o.tv_samples = 300;
    return o;
}

} // namespace

TEST(Mixing, Scale)
{
    EXPECT_DOUBLE_EQ(mixing_scale(TumbleKind::instantaneous(2.0), 1.5), 0.5 * (1 + 9.0));
    EXPECT_DOUBLE_EQ(mixing_scale(TumbleKind::finite(2.0, 0.5), 1.0), (0.5 + 2.0) * (1 + 4.0));
}

TEST(Mixing, InitGrid)
{
    const auto g = mixing_init_grid(TumbleKind::finite(1.0, 1.0), 2.0, {0.0, 0.5, 1.0});
    EXPECT_EQ(g.size(), 27u);
    for (const ContState& s : g) {
        EXPECT_GE(s.x, 0.0);
        EXPECT_LE(s.x, 2.0);
    }
}

TEST(Mixing, EstimateInvariants)
{
    const MixingEstimate e = estimate_mixing_time(TumbleKind::instantaneous(1.0), 1.0, small(), 17);
    EXPECT_GT(e.t_mix_coupling, 0.0);
    EXPECT_LE(e.q50, e.q90);
    EXPECT_LE(e.q_eps_lo, e.q_eps);
    EXPECT_LE(e.q_eps, e.q_eps_hi);
    EXPECT_EQ(e.worst.size(), 2u);
    ASSERT_FALSE(e.tv_curve.empty());
    for (const TvPoint& p : e.tv_curve)
        for (double tv : p.tv) {
            EXPECT_GE(tv, 0.0);
            EXPECT_LE(tv, 1.0);
        }
    // Nonincreasing up to noise.
    const std::size_t mid = e.tv_bins.size() / 2;
    EXPECT_LE(e.tv_curve.back().tv[mid], e.tv_curve.front().tv[mid] + 0.05);
    const auto j = nlohmann::json::parse(e.to_json());
    EXPECT_TRUE(j.contains("t_mix_coupling"));
    EXPECT_TRUE(j.contains("tv_curve"));
}

TEST(Mixing, Deterministic)
{
    MixingOptions o = small();
    o.tv_samples = 0;
    const double a = estimate_mixing_time(TumbleKind::finite(1.0, 2.0), 1.0, o, 5).t_mix_coupling;
    o.workers = 3;
    const double b = estimate_mixing_time(TumbleKind::finite(1.0, 2.0), 1.0, o, 5).t_mix_coupling;
    EXPECT_EQ(a, b);
}

TEST(Mixing, RejectsBadEpsilon)
{
    MixingOptions o = small();
    o.epsilon = 1.0;
    EXPECT_THROW(estimate_mixing_time(TumbleKind::instantaneous(1.0), 1.0, o, 1), std::invalid_argument);
}

TEST(Mixing, PersistentRegimeGrowsWithLength)
{
    MixingOptions o = small();
    o.tv_samples = 0;
    const double a = estimate_mixing_time(TumbleKind::instantaneous(1.0), 1.0, o, 2).t_mix_coupling;
    const double b = estimate_mixing_time(TumbleKind::instantaneous(1.0), 4.0, o, 2).t_mix_coupling;
    EXPECT_GT(b, 3.0 * a);
}
