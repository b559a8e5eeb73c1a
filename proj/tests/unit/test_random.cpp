#include <gtest/gtest.h>

#include <atomic>
#include <vector>

#include "rtp/parallel.hpp"
#include "rtp/random.hpp"
#include "rtp/stats.hpp"

using namespace rtp;

TEST(Stream, UniformIsOpen)
{
    Stream s(5);
    for (int i = 0; i < 100000; ++i) {
        const double u = s.uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
}

TEST(Stream, RolesAreDistinct)
{
    Stream a(1, 0, StreamRole::particle1);
    Stream b(1, 0, StreamRole::particle2);
    Stream c(1, 1, StreamRole::particle1);
    const auto x = a();
    EXPECT_NE(x, b());
    EXPECT_NE(x, c());
}

TEST(Stream, ExponentialMean)
{
    Stream s(9);
    std::vector<double> v(100000);
    for (double& x : v)
        x = s.exponential(4.0);
    const MeanEstimate m = mean_estimate(v);
    EXPECT_NEAR(m.mean, 0.25, 4 * m.stderr_);
}

TEST(Quantile, SmallestOrderStatistic)
{
    EXPECT_EQ(empirical_quantile({3, 1, 2, 4}, 0.5), 2);
    EXPECT_EQ(empirical_quantile({3, 1, 2, 4}, 0.51), 3);
    EXPECT_EQ(empirical_quantile({3, 1, 2, 4}, 1.0), 4);
    EXPECT_EQ(empirical_quantile({3, 1, 2, 4}, 0.0), 1);
}

TEST(Parallel, ResultsIndependentOfWorkers)
{
    auto run = [](int workers) {
        std::vector<double> v(1000);
        parallel_for(v.size(), workers, [&](std::size_t i) { v[i] = Stream(7, i, StreamRole::sampling).uniform(); });
        return v;
    };
    EXPECT_EQ(run(1), run(4));
}

TEST(Parallel, PropagatesExceptions)
{
    EXPECT_THROW(parallel_for(10, 3, [](std::size_t i) {
                     if (i == 7)
                         throw std::runtime_error("x");
                 }),
                 std::runtime_error);
}
