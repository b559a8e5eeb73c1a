#include <gtest/gtest.h>

#include <cmath>

#include "rtp/coupling.hpp"
#include "rtp/lattice.hpp"

using namespace rtp;

TEST(DiscreteContinuous, InitialSiteWithinOneSpacing)
{
    for (int L : {2, 5, 11, 1000})
        for (double x : {0.0, 0.1, 0.37, 0.5, 0.999, 1.0}) {
            const int y = coupled_initial_site(x, L, 1.0);
            EXPECT_GE(y, 1);
            EXPECT_LE(y, L);
            EXPECT_LE(std::abs(embed_position(y, L, 1.0) - x), 1.0 / (L - 1) + 1e-15);
        }
}

TEST(DiscreteContinuous, FrozenVelocityNoRings)
{
    const TumbleKind k = TumbleKind::instantaneous(1e-12);
    const ContParams params{1.0, k};
    ScriptedClock r1({});
    ScriptedClock r2({});
    PairVelocitySampler v(k, {-1, 1}, Stream(1), Stream(2));
    const DiscreteContinuousPair pair = couple_discrete_continuous(11, params, 0.3, {-1, 1}, 0.3, v, r1, r2);
    for (const LatticeChange& c : pair.discrete.changes)
        EXPECT_EQ(c.state.y, pair.discrete.initial.y);
    double prev = 0.0;
    for (double t : {0.0, 0.05, 0.1, 0.2, 0.3}) {
        const double d = sup_deviation(pair, t);
        EXPECT_GE(d, prev);
        prev = d;
    }
    EXPECT_NEAR(sup_deviation(pair, 0.3), std::abs(0.3 + 0.6 - embed_position(pair.discrete.initial.y, 11, 1.0)),
                1e-12);
}

TEST(DiscreteContinuous, ScriptedRingsMoveLattice)
{
    const TumbleKind k = TumbleKind::instantaneous(1e-12);
    const ContParams params{1.0, k};
    ScriptedClock r1({0.1, 0.2});
    ScriptedClock r2({0.15});
    PairVelocitySampler v(k, {-1, 1}, Stream(1), Stream(2));
    const DiscreteContinuousPair pair = couple_discrete_continuous(11, params, 0.5, {-1, 1}, 0.3, v, r1, r2);
    const int y0 = pair.discrete.initial.y;
    // Clock 1 moves y - s1 = y + 1, clock 2 moves y + s2 = y + 1.
    EXPECT_EQ(pair.discrete.state_at(0.12).y, y0 + 1);
    EXPECT_EQ(pair.discrete.state_at(0.16).y, y0 + 2);
    EXPECT_EQ(pair.discrete.state_at(0.25).y, y0 + 3);
}

TEST(DiscreteContinuous, RecordedAndStreamedDeviationAgree)
{
    const ContParams params{1.0, TumbleKind::instantaneous(1.0)};
    for (std::uint64_t rep = 0; rep < 5; ++rep) {
        const DiscreteContinuousPair pair = couple_discrete_continuous(50, params, 0.4, {1, -1}, 2.0, 9, rep);
        const double a = sup_deviation(pair, 2.0);
        const double b = coupled_sup_deviation(50, params, 0.4, {1, -1}, 2.0, 9, rep);
        EXPECT_GE(a, 0.0);
        EXPECT_NEAR(a, b, 1e-12);
    }
}

TEST(DiscreteContinuous, LatticeMemberHasDiscreteLaw)
{
    const int L = 5;
    const TumbleKind k = TumbleKind::instantaneous(1.0);
    const ContParams params{1.0, k};
    const double horizon = 1e4;
    const DiscreteContinuousPair pair = couple_discrete_continuous(L, params, 0.5, {1, 1}, horizon, 31);
    const LatticeParams lp = LatticeParams::scaled_chain(L, 1.0, k);
    std::vector<double> occ(lp.state_count(), 0.0);
    LatticeState s = pair.discrete.initial;
    double last = 0.0;
    for (const LatticeChange& c : pair.discrete.changes) {
        occ[state_index(lp, s)] += c.time - last;
        last = c.time;
        s = c.state;
    }
    occ[state_index(lp, s)] += horizon - last;
    for (double& v : occ)
        v /= horizon;
    EXPECT_LE(total_variation(occ, stationary_distribution(lp).values()), 0.02);
}

TEST(Bound, ReferenceValue)
{
    EXPECT_NEAR(deviation_bound(0.1, 1.0, 1000001, 1.0, 2.0), 1e-5 + 80 * std::sqrt(11e-6), 1e-14);
    const DeviationBound b = deviation_bound(0.1, 1.0, 1000001, 1.0, TumbleKind::instantaneous(1.0));
    EXPECT_DOUBLE_EQ(b.eta, 2.0);
    EXPECT_THROW(deviation_bound(0.0, 1.0, 10, 1.0, 2.0), std::invalid_argument);
    EXPECT_THROW(deviation_bound(0.1, 1.0, 1, 1.0, 2.0), std::invalid_argument);
}

TEST(DiscreteDiscrete, CoordinatesStayMatched)
{
    for (const TumbleKind& k : {TumbleKind::instantaneous(1.0), TumbleKind::finite(1.0, 1.0)}) {
        const LatticeParams p = LatticeParams::scaled_chain(9, 1.0, k);
        const LatticeState a{1, {1, -1}};
        const LatticeState b{9, {-1, 1}};
        for (std::uint64_t rep = 0; rep < 20; ++rep) {
            const DiscreteDiscretePair pair = couple_discrete_discrete(p, a, b, 200.0, 5, rep);
            ASSERT_LE(pair.times.tau_sigma, pair.times.tau_coupling);
            EXPECT_EQ(pair.times.tau_sigma, std::max(pair.times.tau1, pair.times.tau2));
            for (const JointLatticeChange& c : pair.changes) {
                if (c.time >= pair.times.tau1)
                    EXPECT_EQ(c.a.sigma.s1, c.b.sigma.s1);
                if (c.time >= pair.times.tau2)
                    EXPECT_EQ(c.a.sigma.s2, c.b.sigma.s2);
                if (c.time >= pair.times.tau_coupling)
                    EXPECT_EQ(c.a, c.b);
                if (c.time < pair.times.tau_sigma)
                    EXPECT_EQ(c.s_matched, 0);
            }
        }
    }
}

TEST(DiscreteDiscrete, EachMemberIsDiscreteProcess)
{
    // Member A alone follows the plain simulator driven by the same streams.
    const LatticeParams p = LatticeParams::scaled_chain(6, 1.0, TumbleKind::instantaneous(1.0));
    const DiscreteDiscretePair pair = couple_discrete_discrete(p, {2, {1, 1}}, {5, {-1, 1}}, 50.0, 12, 3);
    const DiscreteTrajectory plain = simulate_discrete(p, {2, {1, 1}}, 50.0, 12, 3);
    for (double t : {0.0, 1.0, 7.5, 20.0, 49.0})
        EXPECT_EQ(pair.at(t).a, plain.state_at(t));
}

TEST(ContinuousContinuous, CouplingInvariants)
{
    for (const TumbleKind& k : {TumbleKind::instantaneous(1.0), TumbleKind::finite(2.0, 1.0)}) {
        const ContParams params{1.0, k};
        const ContState a{0.0, pair_alphabet(k).front()};
        const ContState b{1.0, pair_alphabet(k).back()};
        for (std::uint64_t rep = 0; rep < 20; ++rep) {
            const ContinuousContinuousPair pair = couple_continuous_continuous(params, a, b, 100.0, 8, rep);
            const CouplingTimes fast = continuous_coupling_times(params, a, b, 100.0, 8, rep);
            EXPECT_EQ(fast.tau_coupling, pair.times.tau_coupling);
            EXPECT_EQ(fast.tau_sigma, pair.times.tau_sigma);
            if (std::isfinite(pair.times.tau_coupling)) {
                EXPECT_GE(pair.times.tau_coupling, pair.times.tau_sigma);
                for (double dt : {0.0, 0.5, 3.0}) {
                    const double t = std::min(pair.times.tau_coupling + dt, 100.0);
                    EXPECT_NEAR(pair.a.position_at(t), pair.b.position_at(t), 1e-12);
                    EXPECT_EQ(pair.a.state_at(t).sigma, pair.b.state_at(t).sigma);
                }
            }
            for (double t = pair.times.tau_sigma; t < 100.0 && std::isfinite(t); t += 1.7)
                EXPECT_EQ(pair.a.state_at(t).sigma, pair.b.state_at(t).sigma);
        }
    }
}

TEST(Convergence, RowIsReproducible)
{
    ConvergenceConfig cfg{TumbleKind::instantaneous(1.0), 1.0, 1.0, 0.1, 40, 3, true, 100, 1};
    const ConvergenceRow a = convergence_row(cfg, 64);
    cfg.workers = 3;
    const ConvergenceRow b = convergence_row(cfg, 64);
    EXPECT_EQ(a.median_deviation, b.median_deviation);
    EXPECT_EQ(a.p_exceed, b.p_exceed);
    EXPECT_GE(a.q90_deviation, a.median_deviation);
    EXPECT_GT(a.w1, 0.0);
    EXPECT_LE(a.p_exceed, 1.0);
}
