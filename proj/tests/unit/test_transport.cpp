#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rtp/random.hpp"
#include "rtp/transport.hpp"

using namespace rtp;

TEST(Transport, MatchesBruteForceAssignment)
{
    Stream rng(5);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + trial % 5;
        std::vector<std::vector<double>> c(n, std::vector<double>(n));
        for (auto& row : c)
            for (double& x : row)
                x = std::floor(rng.uniform() * 20.0);
        std::vector<int> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        double best = INFINITY;
        do {
            double s = 0.0;
            for (int i = 0; i < n; ++i)
                s += c[i][perm[i]];
            best = std::min(best, s);
        } while (std::next_permutation(perm.begin(), perm.end()));
        const std::vector<double> ones(n, 1.0);
        const TransportSolution sol = solve_transport(ones, ones, [&](int i, int j) { return c[i][j]; });
        EXPECT_NEAR(sol.cost, best, 1e-9) << "trial " << trial;
    }
}

TEST(Transport, OneDimensionalAgainstCdf)
{
    Stream rng(6);
    for (int trial = 0; trial < 20; ++trial) {
        const int m = 5 + trial;
        const int n = 3 + 2 * trial;
        std::vector<double> xs(m), ys(n), a(m), b(n);
        for (int i = 0; i < m; ++i) {
            xs[i] = rng.uniform();
            a[i] = rng.uniform();
        }
        for (int j = 0; j < n; ++j) {
            ys[j] = rng.uniform();
            b[j] = rng.uniform();
        }
        const double sa = std::accumulate(a.begin(), a.end(), 0.0);
        const double sb = std::accumulate(b.begin(), b.end(), 0.0);
        for (double& v : a)
            v /= sa;
        for (double& v : b)
            v /= sb;
        std::vector<std::pair<double, double>> ev;
        for (int i = 0; i < m; ++i)
            ev.emplace_back(xs[i], a[i]);
        for (int j = 0; j < n; ++j)
            ev.emplace_back(ys[j], -b[j]);
        std::sort(ev.begin(), ev.end());
        double f = 0.0;
        double oracle = 0.0;
        for (std::size_t k = 0; k + 1 < ev.size(); ++k) {
            f += ev[k].second;
            oracle += std::abs(f) * (ev[k + 1].first - ev[k].first);
        }
        const TransportSolution sol = solve_transport(a, b, [&](int i, int j) { return std::abs(xs[i] - ys[j]); });
        EXPECT_NEAR(sol.cost, oracle, 1e-12);
    }
}

TEST(Transport, FlowsAreFeasible)
{
    const std::vector<double> a{0.2, 0.5, 0.3};
    const std::vector<double> b{0.6, 0.1, 0.1, 0.2};
    const TransportSolution sol = solve_transport(a, b, [](int i, int j) { return std::abs(i - j) + 0.1 * i; });
    std::vector<double> out(3, 0.0), in(4, 0.0);
    double cost = 0.0;
    for (const TransportFlow& f : sol.flows) {
        EXPECT_GE(f.mass, 0.0);
        out[f.source] += f.mass;
        in[f.sink] += f.mass;
        cost += f.mass * (std::abs(f.source - f.sink) + 0.1 * f.source);
    }
    for (int i = 0; i < 3; ++i)
        EXPECT_NEAR(out[i], a[i], 1e-12);
    for (int j = 0; j < 4; ++j)
        EXPECT_NEAR(in[j], b[j], 1e-12);
    EXPECT_NEAR(cost, sol.cost, 1e-12);
}

TEST(Transport, RejectsBadInput)
{
    auto c = [](int, int) { return 1.0; };
    EXPECT_THROW(solve_transport({1.0}, {0.5}, c), std::invalid_argument);
    EXPECT_THROW(solve_transport({-1.0, 2.0}, {1.0}, c), std::invalid_argument);
    EXPECT_THROW(solve_transport({}, {}, c), std::invalid_argument);
}
