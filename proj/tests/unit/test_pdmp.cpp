#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "rtp/measures.hpp"
#include "rtp/pdmp.hpp"

using namespace rtp;

TEST(Classify, JamRules)
{
    EXPECT_EQ(classify({0.0, {1, -1}}, 1.0), StateClass::jammed_at_zero);
    EXPECT_EQ(classify({0.0, {1, 1}}, 1.0), StateClass::jammed_at_zero);
    EXPECT_EQ(classify({0.0, {-1, 1}}, 1.0), StateClass::bulk);
    EXPECT_EQ(classify({1.0, {-1, 1}}, 1.0), StateClass::jammed_at_ell);
    EXPECT_EQ(classify({1.0, {0, 0}}, 1.0), StateClass::jammed_at_ell);
    EXPECT_EQ(classify({1.0, {1, 0}}, 1.0), StateClass::bulk);
    EXPECT_EQ(classify({0.4, {1, 1}}, 1.0), StateClass::bulk);
}

TEST(Flow, ClosedFormExit)
{
    const FlowResult r = flow_segment(0.3, {1, -1}, 1.0, 1.0);
    EXPECT_DOUBLE_EQ(r.x, 0.0);
    ASSERT_TRUE(r.clamp.has_value());
    EXPECT_DOUBLE_EQ(r.clamp->time, 0.15);
    EXPECT_EQ(r.clamp->boundary, Boundary::zero);

    const FlowResult u = flow_segment(0.3, {0, 1}, 0.5, 1.0);
    EXPECT_DOUBLE_EQ(u.x, 0.8);
    EXPECT_FALSE(u.clamp.has_value());

    const FlowResult j = flow_segment(1.0, {-1, 1}, 0.5, 1.0);
    EXPECT_DOUBLE_EQ(j.x, 1.0);
    ASSERT_TRUE(j.clamp.has_value());
    EXPECT_EQ(j.clamp->time, 0.0);

    const FlowResult s = flow_segment(0.25, {1, 1}, 10.0, 1.0);
    EXPECT_EQ(s.x, 0.25);
    EXPECT_FALSE(s.clamp.has_value());
}

TEST(Simulator, StaysInIntervalAndSegmentsChain)
{
    const ContParams params{2.0, TumbleKind::finite(1.0, 0.5)};
    const ContinuousRun run = simulate_continuous(params, {1.0, {0, 0}}, 100.0, 5);
    const auto segs = run.path.segments();
    ASSERT_FALSE(segs.empty());
    for (std::size_t i = 0; i < segs.size(); ++i) {
        EXPECT_GE(segs[i].x0, 0.0);
        EXPECT_LE(segs[i].x0, 2.0);
        EXPECT_GE(segs[i].x1, 0.0);
        EXPECT_LE(segs[i].x1, 2.0);
        if (i > 0) {
            EXPECT_DOUBLE_EQ(segs[i].t0, segs[i - 1].t1);
            EXPECT_NEAR(segs[i].x0, segs[i - 1].x1, 1e-12);
        }
    }
}

TEST(Simulator, AgreesWithFineStepIntegrator)
{
    for (const TumbleKind& k : {TumbleKind::instantaneous(1.3), TumbleKind::finite(2.0, 1.0)}) {
        const ContParams params{1.0, k};
        const double horizon = 30.0;
        const ContinuousRun run = simulate_continuous(params, {0.4, {1, -1}}, horizon, 17);
        const double dt = 1e-4;
        double x = 0.4;
        double worst = 0.0;
        for (int i = 0; i * dt < horizon; ++i) {
            const double t = i * dt;
            const VelocityPair s = run.velocities.state_at(t);
            x = std::clamp(x + s.relative_speed() * dt, 0.0, 1.0);
            worst = std::max(worst, std::abs(run.path.position_at(t + dt) - x));
        }
        // Each velocity event shifts the Euler path by at most 2 dt.
        EXPECT_LT(worst, 2 * dt * (run.velocities.events().size() + 2));
        EXPECT_LT(worst, 0.05);
    }
}

TEST(Simulator, Deterministic)
{
    const ContParams params{1.0, TumbleKind::instantaneous(1.0)};
    const ContinuousRun a = simulate_continuous(params, {0.5, {1, 1}}, 20.0, 3, 4);
    const ContinuousRun b = simulate_continuous(params, {0.5, {1, 1}}, 20.0, 3, 4);
    ASSERT_EQ(a.path.breakpoints().size(), b.path.breakpoints().size());
    for (std::size_t i = 0; i < a.path.breakpoints().size(); ++i)
        EXPECT_EQ(a.path.breakpoints()[i].x, b.path.breakpoints()[i].x);
}

TEST(Simulator, RejectsOutOfRangeStart)
{
    const ContParams params{1.0, TumbleKind::instantaneous(1.0)};
    EXPECT_THROW(ContinuousSimulator(params, {1.5, {1, 1}}, 1), std::invalid_argument);
    EXPECT_THROW(ContinuousSimulator(params, {0.5, {0, 1}}, 1), std::invalid_argument);
}

TEST(Occupation, MassAndMerge)
{
    const ContParams params{1.0, TumbleKind::instantaneous(1.0)};
    OccupationAccumulator a = stream_occupation(params, {0.5, {1, -1}}, 500.0, 20, 1);
    const OccupationAccumulator b = stream_occupation(params, {0.5, {1, -1}}, 1500.0, 20, 2);
    EXPECT_NEAR(a.measure().total_mass(), 1.0, 1e-12);
    a.merge(b);
    EXPECT_NEAR(a.measure().total_mass(), 1.0, 1e-12);
}

TEST(Occupation, RecordedAndStreamedAgree)
{
    const ContParams params{1.0, TumbleKind::finite(1.0, 1.0)};
    const ContinuousRun run = simulate_continuous(params, {0.2, {0, 1}}, 300.0, 8);
    const OccupationAccumulator acc = stream_occupation(params, {0.2, {0, 1}}, 300.0, 10, 8);
    EXPECT_LT(tv_distance(occupation_measure(run, 10), acc.measure()), 1e-12);
}

TEST(Occupation, JammedFractionMatchesMeasure)
{
    const ContParams params{1.0, TumbleKind::instantaneous(1.0)};
    const OccupationAccumulator acc = stream_occupation(params, {0.5, {1, -1}}, 1e5, 50, 2718);
    const AtomicDensityMeasure pi = citp_invariant(1.0, 1.0);
    double atoms0 = 0.0;
    for (const SheetCoefficients& c : pi.rows())
        atoms0 += c.d0;
    EXPECT_NEAR(acc.jammed_fraction(Boundary::zero), atoms0, 0.01);
    EXPECT_LE(tv_distance(acc.measure(), pi.discretize(50)), 0.02);
}

TEST(PathCsv, Header)
{
    const ContParams params{1.0, TumbleKind::instantaneous(1.0)};
    const ContinuousRun run = simulate_continuous(params, {0.5, {1, -1}}, 5.0, 1);
    std::ostringstream os;
    run.path.write_csv(os);
    EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "t_break,x,s1,s2,clamp_flag");
}
