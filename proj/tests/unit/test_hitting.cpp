#include <gtest/gtest.h>

#include <cmath>

#include <Eigen/Dense>

#include "rtp/hitting.hpp"

using namespace rtp;

TEST(JamHitting, SpotValue) { EXPECT_NEAR(mean_hitting_time_citp(0.5, {1, -1}, 1.0, 1.0), 1.375, 1e-15); }

TEST(JamHitting, SolvesBackwardEquation)
{
    // v E' + omega sum_(one-coordinate flips) (E(s') - E(s)) = -1 in the bulk.
    const double h = 1e-5;
    for (double omega : {0.5, 1.0, 3.0})
        for (double ell : {0.5, 2.0})
            for (double x : {0.1 * ell, 0.5 * ell, 0.9 * ell})
                for (VelocityPair s : pair_alphabet(TumbleKind::instantaneous(omega))) {
                    auto e = [&](double y, VelocityPair p) { return mean_hitting_time_citp(y, p, omega, ell); };
                    const double d = (e(x + h, s) - e(x - h, s)) / (2 * h);
                    const double gen = s.relative_speed() * d + omega * (e(x, {-s.s1, s.s2}) - e(x, s)) +
                                       omega * (e(x, {s.s1, -s.s2}) - e(x, s));
                    EXPECT_NEAR(gen, -1.0, 1e-6) << omega << " " << ell << " " << x;
                }
}

TEST(JamHitting, BoundaryConditions)
{
    for (double omega : {0.5, 2.0})
        for (double ell : {1.0, 3.0}) {
            auto e = [&](double y, VelocityPair p) { return mean_hitting_time_citp(y, p, omega, ell); };
            EXPECT_NEAR(e(0.0, {1, -1}), 0.0, 1e-15);
            // Jammed at ell with sigma = (-1,1): only tumbles move the state.
            const VelocityPair s{-1, 1};
            const double gen = omega * (e(ell, {1, 1}) - e(ell, s)) + omega * (e(ell, {-1, -1}) - e(ell, s));
            EXPECT_NEAR(gen, -1.0, 1e-12);
        }
}

TEST(JamHitting, BoundIsMaximum)
{
    for (double omega : {0.25, 1.0, 4.0})
        for (double ell : {0.5, 2.0}) {
            const HittingBound b = hitting_bound_citp(omega, ell);
            double scan = 0.0;
            for (int i = 0; i <= 1000; ++i)
                for (VelocityPair s : pair_alphabet(TumbleKind::instantaneous(omega)))
                    scan = std::max(scan, mean_hitting_time_citp(ell * i / 1000, s, omega, ell));
            EXPECT_NEAR(b.value, scan, 1e-12);
            EXPECT_EQ(b.x, ell);
        }
}

TEST(JamHitting, RejectsBadInput)
{
    EXPECT_THROW(mean_hitting_time_citp(-0.1, {1, 1}, 1.0, 1.0), std::out_of_range);
    EXPECT_THROW(mean_hitting_time_citp(0.1, {0, 1}, 1.0, 1.0), std::invalid_argument);
}

TEST(VelocityCoupling, MatchesLinearSolve)
{
    for (auto [alpha, beta] : {std::pair{1.0, 1.0}, std::pair{2.0, 0.5}, std::pair{0.5, 3.0}}) {
        const TumbleKind k = TumbleKind::finite(alpha, beta);
        const Eigen::MatrixXd q = pair_generator(k);
        const auto pairs = pair_alphabet(k);
        std::vector<int> off;
        for (int i = 0; i < 9; ++i)
            if (!pairs[i].on_diagonal())
                off.push_back(i);
        Eigen::MatrixXd a(6, 6);
        for (int r = 0; r < 6; ++r)
            for (int c = 0; c < 6; ++c)
                a(r, c) = q(off[r], off[c]);
        const Eigen::VectorXd t = a.lu().solve(-Eigen::VectorXd::Ones(6));
        for (int r = 0; r < 6; ++r)
            EXPECT_NEAR(mean_velocity_coupling_time_cftp(pairs[off[r]].s1, pairs[off[r]].s2, alpha, beta), t(r),
                        1e-12);
        EXPECT_EQ(mean_velocity_coupling_time_cftp(0, 0, alpha, beta), 0.0);
    }
    EXPECT_NEAR(mean_velocity_coupling_time_cftp(-1, 1, 1.0, 1.0), 4.0 / 3.0, 1e-15);
}

TEST(DiagonalReturn, ClosedFormsAgreeWithSolve)
{
    for (auto [alpha, beta] : {std::pair{1.0, 1.0}, std::pair{2.0, 0.5}, std::pair{0.5, 2.0}, std::pair{3.0, 0.7}}) {
        const DiagonalReturnStatistics st = diagonal_return_statistics(alpha, beta);
        for (int i = 0; i < 9; ++i) {
            EXPECT_NEAR(st.mean_return[i], st.mean_return_solved[i], 1e-12);
            const DiagonalLaw& law = st.hit_law[i];
            EXPECT_NEAR(law[0] + law[1] + law[2], 1.0, 1e-12);
            EXPECT_NEAR(law[1], 2 * alpha / (2 * alpha + beta), 1e-12);
        }
        // The per-step mean is the stationary average over the embedded diagonal chain.
        const TumbleKind k = TumbleKind::finite(alpha, beta);
        const int idx[3] = {pair_index(k, {1, 1}), pair_index(k, {0, 0}), pair_index(k, {-1, -1})};
        Eigen::Matrix3d p;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                p(a, b) = st.hit_law[idx[a]][b];
        Eigen::Matrix3d m = Eigen::Matrix3d::Identity() - p.transpose();
        m.row(2).setOnes();
        const Eigen::Vector3d pi = m.lu().solve(Eigen::Vector3d(0, 0, 1));
        double avg = 0.0;
        for (int a = 0; a < 3; ++a)
            avg += pi(a) * st.mean_return_solved[idx[a]];
        EXPECT_NEAR(st.per_step_mean, avg, 1e-12);
        EXPECT_NEAR(st.per_step_mean_solved[idx[1]], st.per_step_mean, 1e-12);
    }
    EXPECT_NEAR(diagonal_return_statistics(1.0, 1.0).per_step_mean, 4.0 / 3.0, 1e-15);
}

TEST(DiagonalReturn, DisplayedLawIsNotAProbability)
{
    const DiagonalReturnStatistics st = diagonal_return_statistics(1.0, 1.0);
    const DiagonalLaw& d = st.displayed_hit_law;
    EXPECT_GT(d[0] + d[1] + d[2], 1.0 + 1e-3);
}

TEST(Excursion, MomentsFromMgfDerivatives)
{
    for (auto [alpha, beta] : {std::pair{1.0, 1.0}, std::pair{2.0, 0.5}, std::pair{0.5, 2.0}}) {
        const auto m = excursion_moments(alpha, beta);
        const double h = 1e-3 * std::sqrt(excursion_mgf_pole(alpha, beta));
        auto f = [&](double l) { return excursion_mgf(l, alpha, beta); };
        const double d2 = (f(h) - 2 * f(0) + f(-h)) / (h * h);
        const double d4 = (f(2 * h) - 4 * f(h) + 6 * f(0) - 4 * f(-h) + f(-2 * h)) / std::pow(h, 4);
        EXPECT_NEAR(f(0), 1.0, 1e-15);
        EXPECT_NEAR(m[1], d2, 1e-5 * m[1]);
        EXPECT_NEAR(m[3], d4, 2e-2 * m[3]);
        EXPECT_EQ(m[0], 0.0);
        EXPECT_EQ(m[2], 0.0);
    }
    EXPECT_NEAR(excursion_moments(1.0, 1.0)[1], 8.0 / 3.0, 1e-15);
}

TEST(Excursion, PoleAndDomain)
{
    const double u = excursion_mgf_pole(1.0, 1.0);
    // 4u^2 - 4*6u + 9 = 0 -> u = (6 - sqrt(27)) / 2.
    EXPECT_NEAR(u, (6.0 - std::sqrt(27.0)) / 2.0, 1e-14);
    EXPECT_THROW(excursion_mgf(std::sqrt(u), 1.0, 1.0), std::domain_error);
    EXPECT_THROW(excursion_mgf(-1.1 * std::sqrt(u), 1.0, 1.0), std::domain_error);
    EXPECT_NO_THROW(excursion_mgf(0.99 * std::sqrt(u), 1.0, 1.0));
}

TEST(Excursion, SampleAgreesWithMgf)
{
    const ExcursionSample ex = sample_diagonal_excursions(1.0, 1.0, {1, 1}, 100000, 4);
    const double lambda = 0.4;
    std::vector<double> v(ex.d.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = std::exp(lambda * ex.d[i]);
    double mean = 0.0;
    for (double x : v)
        mean += x;
    mean /= v.size();
    double var = 0.0;
    for (double x : v)
        var += (x - mean) * (x - mean);
    const double se = std::sqrt(var / (v.size() - 1) / v.size());
    EXPECT_NEAR(mean, excursion_mgf(lambda, 1.0, 1.0), 4 * se);
    EXPECT_EQ(ex.hits[0] + ex.hits[1] + ex.hits[2], ex.d.size());
}

TEST(ZeroExcursions, LaplaceLaw)
{
    const ZeroExcursionCheck c = zero_excursion_law_check(2.0, 50000, 6);
    EXPECT_LT(c.ks, c.ks_critical);
    EXPECT_NEAR(c.second_moment, 0.5, 4 * c.second_moment_stderr);
    EXPECT_NEAR(c.fraction_positive, 0.5, 0.01);
    EXPECT_LT(std::abs(c.lag1_autocorrelation), 0.02);
}

TEST(Autocorrelation, Alternating)
{
    std::vector<double> v;
    for (int i = 0; i < 1000; ++i)
        v.push_back(i % 2 ? 1.0 : -1.0);
    EXPECT_NEAR(lag1_autocorrelation(v), -1.0, 1e-2);
    EXPECT_THROW(lag1_autocorrelation({1.0, 2.0}), std::invalid_argument);
}

TEST(MonteCarlo, RoughAgreementAndDeterminism)
{
    const TumbleKind k = TumbleKind::instantaneous(1.0);
    const MonteCarloEstimate a = monte_carlo_hitting(k, 1.0, JamAtZero{{0.5, {1, -1}}}, 20000, 3);
    EXPECT_NEAR(a.mean, 1.375, 4 * a.stderr_);
    const MonteCarloEstimate b = monte_carlo_hitting(k, 1.0, JamAtZero{{0.5, {1, -1}}}, 20000, 3, 3);
    EXPECT_EQ(a.mean, b.mean);
    const TumbleKind f = TumbleKind::finite(1.0, 1.0);
    const MonteCarloEstimate c = monte_carlo_hitting(f, 1.0, DiagonalReturn{{1, -1}}, 20000, 4);
    EXPECT_NEAR(c.mean, diagonal_return_statistics(1.0, 1.0).mean_return[pair_index(f, {1, -1})], 4 * c.stderr_);
}
