#include <gtest/gtest.h>

#include <cmath>
#include <queue>
#include <sstream>

#include <Eigen/Dense>

#include "rtp/lattice.hpp"

using namespace rtp;

namespace {

std::vector<TumbleKind> kinds() { return {TumbleKind::instantaneous(1.0), TumbleKind::finite(2.0, 0.5)}; }

bool strongly_connected(const SparseGenerator& g)
{
    const int n = static_cast<int>(g.rows());
    auto reach = [&](const SparseGenerator& m) {
        std::vector<char> seen(n, 0);
        std::queue<int> q;
        q.push(0);
        seen[0] = 1;
        int count = 1;
        while (!q.empty()) {
            const int i = q.front();
            q.pop();
            for (SparseGenerator::InnerIterator it(m, i); it; ++it)
                if (it.col() != i && it.value() > 0.0 && !seen[it.col()]) {
                    seen[it.col()] = 1;
                    ++count;
                    q.push(static_cast<int>(it.col()));
                }
        }
        return count == n;
    };
    const SparseGenerator gt = SparseGenerator(g.transpose());
    return reach(g) && reach(gt);
}

// Dense solve of pi [G | 1] = [0 | 1] by QR.
Eigen::VectorXd dense_stationary(const SparseGenerator& g)
{
    const int n = static_cast<int>(g.rows());
    Eigen::MatrixXd a(n + 1, n);
    a.topRows(n) = Eigen::MatrixXd(g).transpose();
    a.row(n).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);
    b(n) = 1.0;
    return a.colPivHouseholderQr().solve(b);
}

} // namespace

TEST(LatticeParams, ScaledChain)
{
    const LatticeParams p = LatticeParams::scaled_chain(11, 2.0, TumbleKind::instantaneous(1.0));
    EXPECT_DOUBLE_EQ(p.gamma * p.ell, 10.0);
    EXPECT_EQ(p.state_count(), 44);
    EXPECT_THROW(LatticeParams::scaled_chain(1, 1.0, TumbleKind::instantaneous(1.0)), std::invalid_argument);
    EXPECT_THROW(LatticeParams::with_rate(5, -1.0, TumbleKind::instantaneous(1.0)), std::invalid_argument);
}

TEST(StepDiscrete, Clamps)
{
    EXPECT_EQ(step_discrete({1, {1, 1}}, Clock::first, 10).y, 1);
    EXPECT_EQ(step_discrete({5, {1, -1}}, Clock::first, 10).y, 4);
    EXPECT_EQ(step_discrete({10, {-1, 1}}, Clock::second, 10).y, 10);
    EXPECT_EQ(step_discrete({5, {0, 0}}, Clock::second, 10).y, 5);
    for (int y = 1; y <= 4; ++y)
        for (int s1 : {-1, 0, 1})
            for (int s2 : {-1, 0, 1})
                for (Clock c : {Clock::first, Clock::second}) {
                    const int next = step_discrete({y, {s1, s2}}, c, 4).y;
                    EXPECT_GE(next, 1);
                    EXPECT_LE(next, 4);
                }
}

TEST(StateIndex, RoundTrip)
{
    for (const TumbleKind& k : kinds()) {
        const LatticeParams p = LatticeParams::scaled_chain(7, 1.0, k);
        for (int i = 0; i < p.state_count(); ++i)
            EXPECT_EQ(state_index(p, state_at_index(p, i)), i);
    }
}

TEST(Embed, Endpoints)
{
    EXPECT_DOUBLE_EQ(embed_position(1, 9, 2.0), 0.0);
    EXPECT_DOUBLE_EQ(embed_position(9, 9, 2.0), 2.0);
    EXPECT_DOUBLE_EQ(embed_position(6, 11, 1.0), 0.5);
    EXPECT_THROW(embed_position(0, 9, 1.0), std::out_of_range);
    EXPECT_THROW(embed_position(10, 9, 1.0), std::out_of_range);
}

TEST(Fold, Values)
{
    const int L = 7;
    for (int k = 1; k <= L; ++k)
        EXPECT_EQ(fold_p_L(k, L), k);
    EXPECT_EQ(fold_p_L(L + 1, L), L);
    EXPECT_EQ(fold_p_L(2 * L + 1, L), 1);
    EXPECT_EQ(fold_p_L(0, L), 1);
    for (std::int64_t z = -3 * L; z <= 3 * L; ++z) {
        EXPECT_LE(std::abs(fold_p_L(z + 1, L) - fold_p_L(z, L)), 1);
        EXPECT_EQ(fold_p_L(z + 2 * L, L), fold_p_L(z, L));
    }
}

TEST(Generator, SmallInstantaneous)
{
    const LatticeParams p = LatticeParams::with_rate(2, 1.0, TumbleKind::instantaneous(1.0));
    const SparseGenerator g = discrete_generator(p);
    ASSERT_EQ(g.rows(), 8);
    const Eigen::MatrixXd d(g);
    EXPECT_LT(d.rowwise().sum().cwiseAbs().maxCoeff(), 1e-14);
    // Jammed ring at (1,(1,1)) is a null move: only the clock-2 ring and two tumbles leave.
    const int i = state_index(p, {1, {1, 1}});
    EXPECT_DOUBLE_EQ(-d(i, i), 1.0 + 2.0);
}

TEST(Generator, IrreducibleAndConservative)
{
    for (const TumbleKind& k : kinds())
        for (int L : {2, 3, 5, 16}) {
            const SparseGenerator g = discrete_generator(LatticeParams::scaled_chain(L, 1.0, k));
            const Eigen::MatrixXd d(g);
            EXPECT_LT(d.rowwise().sum().cwiseAbs().maxCoeff(), 1e-12);
            EXPECT_TRUE(strongly_connected(g)) << L;
            for (int r = 0; r < g.outerSize(); ++r)
                EXPECT_LE(g.innerVector(r).nonZeros(), 7);
        }
}

TEST(Stationary, MatchesDenseSolve)
{
    for (const TumbleKind& k : kinds())
        for (int L : {2, 5, 12}) {
            const LatticeParams p = LatticeParams::scaled_chain(L, 1.5, k);
            const StationaryVector pi = stationary_distribution(p);
            const Eigen::VectorXd oracle = dense_stationary(discrete_generator(p));
            for (int i = 0; i < p.state_count(); ++i)
                EXPECT_NEAR(pi.values()[i], oracle(i), 1e-12);
            EXPECT_LT(pi.residual(), 1e-12);
        }
}

TEST(Stationary, VelocityMarginalIsProduct)
{
    for (const TumbleKind& k : kinds())
        for (int L = 2; L <= 12; ++L) {
            const StationaryVector pi = stationary_distribution(LatticeParams::scaled_chain(L, 1.0, k));
            const Eigen::VectorXd single = single_stationary(k);
            for (VelocityPair s : pair_alphabet(k)) {
                double m = 0.0;
                for (int y = 1; y <= L; ++y)
                    m += pi(y, s);
                EXPECT_NEAR(m, single(k.index_of(s.s1)) * single(k.index_of(s.s2)), 1e-12);
            }
        }
}

TEST(Stationary, RelabelingSymmetry)
{
    for (const TumbleKind& k : kinds()) {
        const int L = 9;
        const StationaryVector pi = stationary_distribution(LatticeParams::scaled_chain(L, 1.0, k));
        for (int y = 1; y <= L; ++y)
            for (VelocityPair s : pair_alphabet(k))
                EXPECT_NEAR(pi(y, s), pi(L + 1 - y, {s.s2, s.s1}), 1e-13);
    }
}

TEST(Stationary, LargeChainSolves)
{
    const StationaryVector pi =
        stationary_distribution(LatticeParams::scaled_chain(11111, 1.0, TumbleKind::finite(1.0, 1.0)));
    double s = 0.0;
    for (double v : pi.values()) {
        EXPECT_GE(v, 0.0);
        s += v;
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
}

TEST(Lumping, FoldedWalkMatchesDiagonalRates)
{
    // While sigma = (1,1) the lattice rates are those of a +-1 walk at rate gamma each way, folded by p_L.
    for (int L = 2; L <= 12; ++L) {
        const double gamma = 1.7;
        const LatticeParams p = LatticeParams::with_rate(L, gamma, TumbleKind::instantaneous(1.0));
        const Eigen::MatrixXd g(discrete_generator(p));
        for (VelocityPair s : {VelocityPair{1, 1}, VelocityPair{-1, -1}})
            for (std::int64_t z = -3 * L; z <= 3 * L; ++z) {
                const int y1 = fold_p_L(z, L);
                for (int y2 = 1; y2 <= L; ++y2) {
                    if (y2 == y1)
                        continue;
                    double walk = 0.0;
                    for (int step : {-1, 1})
                        if (fold_p_L(z + step, L) == y2)
                            walk += gamma;
                    EXPECT_DOUBLE_EQ(walk, g(state_index(p, {y1, s}), state_index(p, {y2, s})))
                        << "L=" << L << " z=" << z << " y2=" << y2;
                }
            }
    }
}

TEST(Simulator, NoRingsKeepsPosition)
{
    const LatticeParams p = LatticeParams::with_rate(6, 0.0, TumbleKind::instantaneous(1.0));
    const DiscreteTrajectory tr = simulate_discrete(p, {4, {1, -1}}, 50.0, 3);
    for (const LatticeChange& c : tr.changes)
        EXPECT_EQ(c.state.y, 4);
}

TEST(Simulator, StaysInRangeAndIsDeterministic)
{
    const LatticeParams p = LatticeParams::with_rate(2, 3.0, TumbleKind::finite(1.0, 1.0));
    const DiscreteTrajectory a = simulate_discrete(p, {1, {0, 0}}, 200.0, 77);
    const DiscreteTrajectory b = simulate_discrete(p, {1, {0, 0}}, 200.0, 77);
    ASSERT_EQ(a.changes.size(), b.changes.size());
    for (std::size_t i = 0; i < a.changes.size(); ++i) {
        EXPECT_EQ(a.changes[i].time, b.changes[i].time);
        EXPECT_EQ(a.changes[i].state, b.changes[i].state);
        EXPECT_GE(a.changes[i].state.y, 1);
        EXPECT_LE(a.changes[i].state.y, 2);
    }
}

TEST(Simulator, OccupationMatchesStationaryL5)
{
    const LatticeParams p = LatticeParams::with_rate(5, 4.0, TumbleKind::instantaneous(1.0));
    const DiscreteOccupation occ = discrete_occupation(p, {3, {1, 1}}, 1e4, 2024);
    const StationaryVector pi = stationary_distribution(p);
    EXPECT_LE(total_variation(occ.fraction, pi.values()), 0.02);
}

TEST(Simulator, OccupationMatchesStationaryL2LongRun)
{
    const std::uint64_t n = 10000000;
    const LatticeParams p = LatticeParams::with_rate(2, 1.0, TumbleKind::instantaneous(1.0));
    const DiscreteOccupation occ = discrete_occupation_events(p, {1, {1, -1}}, n, 99);
    const StationaryVector pi = stationary_distribution(p);
    const double tv = total_variation(occ.fraction, pi.values());
    EXPECT_LE(tv, 0.003);
    EXPECT_LE(tv, 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST(StationaryCsv, HeaderAndRows)
{
    const StationaryVector pi = stationary_distribution(LatticeParams::scaled_chain(3, 1.0, TumbleKind::instantaneous(1.0)));
    std::ostringstream os;
    write_stationary_csv(os, pi);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line.rfind("# residual=", 0), 0u);
    std::getline(is, line);
    EXPECT_EQ(line, "y,s1,s2,prob");
    int rows = 0;
    while (std::getline(is, line))
        ++rows;
    EXPECT_EQ(rows, 12);
}
