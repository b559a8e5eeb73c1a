#include "rtp/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "rtp/coupling.hpp"
#include "rtp/measures.hpp"
#include "rtp/parallel.hpp"
#include "rtp/stats.hpp"

namespace rtp {

double mixing_scale(const TumbleKind& kind, double ell)
{
    if (kind.is_instantaneous()) {
        const double w = kind.omega();
        return (1.0 + w * w * ell * ell) / w;
    }
    const double a = kind.alpha();
    return (1.0 / a + 1.0 / kind.beta()) * (1.0 + a * a * ell * ell);
}

std::vector<ContState> mixing_init_grid(const TumbleKind& kind, double ell, const std::vector<double>& x_fractions)
{
    std::vector<ContState> out;
    for (double f : x_fractions) {
        if (f < 0.0 || f > 1.0)
            throw std::invalid_argument("grid fractions must lie in [0, 1]");
        const double x = f == 1.0 ? ell : f * ell;
        for (const VelocityPair& s : pair_alphabet(kind))
            out.push_back({x, s});
    }
    return out;
}

namespace {

void deposit(DiscretizedMeasure& m, const ContState& s, double w)
{
    const int p = pair_index(m.kind(), s.sigma);
    switch (classify(s, m.ell())) {
    case StateClass::jammed_at_zero:
        m.atom_zero(p) += w;
        break;
    case StateClass::jammed_at_ell:
        m.atom_ell(p) += w;
        break;
    case StateClass::bulk: {
        const int b = std::clamp(static_cast<int>(s.x / m.bin_width()), 0, m.bins() - 1);
        m.bulk(p, b) += w;
        break;
    }
    }
}

} // namespace

MixingEstimate estimate_mixing_time(const TumbleKind& kind, double ell, const MixingOptions& opt, std::uint64_t seed)
{
    if (!(opt.epsilon > 0.0 && opt.epsilon < 1.0))
        throw std::invalid_argument("epsilon must lie in (0, 1)");
    if (opt.replicas < 1 || opt.pilot_replicas < 1 || opt.worst_pairs < 1)
        throw std::invalid_argument("replica counts must be >= 1");
    const ContParams params{ell, kind};
    params.validate();
    const std::vector<ContState> grid = mixing_init_grid(kind, ell, opt.x_fractions);
    std::vector<InitPair> pairs;
    for (std::size_t i = 0; i < grid.size(); ++i)
        for (std::size_t j = i + 1; j < grid.size(); ++j)
            pairs.push_back({grid[i], grid[j]});
    if (pairs.empty())
        throw std::invalid_argument("init grid needs at least two states");
    const double cap = opt.cap_factor * mixing_scale(kind, ell);
    const double p = 1.0 - opt.epsilon;

    // Screening pass.
    const std::size_t pilot = opt.pilot_replicas;
    std::vector<double> pilot_tau(pairs.size() * pilot);
    parallel_for(pilot_tau.size(), opt.workers, [&](std::size_t k) {
        const std::size_t pi = k / pilot;
        pilot_tau[k] = continuous_coupling_times(params, pairs[pi].a, pairs[pi].b, cap, derive_seed(seed, {1, pi}),
                                                 k % pilot)
                           .tau_coupling;
    });
    std::vector<double> pilot_q(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i)
        pilot_q[i] = empirical_quantile(
            std::vector<double>(pilot_tau.begin() + i * pilot, pilot_tau.begin() + (i + 1) * pilot), p);
    std::vector<std::size_t> order(pairs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pilot_q[a] > pilot_q[b]; });
    order.resize(std::min<std::size_t>(order.size(), opt.worst_pairs));

    // Full pass on the worst pairs.
    const std::size_t R = opt.replicas;
    std::vector<double> tau(order.size() * R);
    parallel_for(tau.size(), opt.workers, [&](std::size_t k) {
        const std::size_t pi = order[k / R];
        tau[k] = continuous_coupling_times(params, pairs[pi].a, pairs[pi].b, cap, derive_seed(seed, {2, pi}), k % R)
                     .tau_coupling;
    });

    MixingEstimate est{kind, ell, opt.epsilon, opt.replicas, seed, {}, {}, 0, 0, 0, 0, 0, 0, opt.tv_bins, {},
                       std::nan(""), 0};
    std::size_t worst_slot = 0;
    for (std::size_t w = 0; w < order.size(); ++w) {
        std::vector<double> sample(tau.begin() + w * R, tau.begin() + (w + 1) * R);
        est.censored += static_cast<std::size_t>(std::count(sample.begin(), sample.end(), kNever));
        est.worst.push_back(pairs[order[w]]);
        est.pair_quantiles.push_back(empirical_quantile(sample, p));
        if (est.pair_quantiles[w] > est.pair_quantiles[worst_slot])
            worst_slot = w;
    }
    est.t_mix_coupling = est.pair_quantiles[worst_slot];
    {
        std::vector<double> sample(tau.begin() + worst_slot * R, tau.begin() + (worst_slot + 1) * R);
        std::sort(sample.begin(), sample.end());
        est.q50 = empirical_quantile(sample, 0.5);
        est.q90 = empirical_quantile(sample, 0.9);
        est.q_eps = est.t_mix_coupling;
        const double n = static_cast<double>(R);
        const double half = 1.96 * std::sqrt(n * p * (1.0 - p));
        const auto lo = static_cast<std::size_t>(std::clamp(std::floor(n * p - half), 1.0, n));
        const auto hi = static_cast<std::size_t>(std::clamp(std::ceil(n * p + half), 1.0, n));
        est.q_eps_lo = sample[lo - 1];
        est.q_eps_hi = sample[hi - 1];
    }

    if (opt.tv_samples > 0 && std::isfinite(est.t_mix_coupling) && !opt.tv_bins.empty()) {
        const AtomicDensityMeasure pi = invariant_measure(kind, ell);
        std::vector<ContState> inits;
        for (const auto& ip : est.worst)
            for (const ContState& s : {ip.a, ip.b})
                if (std::find(inits.begin(), inits.end(), s) == inits.end())
                    inits.push_back(s);
        std::vector<double> times;
        for (double f : opt.tv_time_factors)
            times.push_back(f * est.t_mix_coupling);
        std::sort(times.begin(), times.end());
        const std::size_t S = opt.tv_samples;
        // samples[init][sample][time]
        std::vector<ContState> states(inits.size() * S * times.size());
        parallel_for(inits.size() * S, opt.workers, [&](std::size_t k) {
            const std::size_t ii = k / S;
            ContinuousSimulator sim(params, inits[ii], derive_seed(seed, {3, ii}), k % S);
            std::size_t ti = 0;
            while (ti < times.size()) {
                const auto seg = sim.next_segment(times.back());
                if (!seg)
                    break;
                while (ti < times.size() && times[ti] <= seg->t1) {
                    const double x = flow_segment(seg->x0, seg->sigma, times[ti] - seg->t0, ell).x;
                    states[k * times.size() + ti] = {x, seg->sigma};
                    ++ti;
                }
            }
        });
        for (std::size_t ti = 0; ti < times.size(); ++ti) {
            TvPoint pt{times[ti], {}};
            for (int bins : opt.tv_bins) {
                const DiscretizedMeasure target = pi.discretize(bins);
                double worst = 0.0;
                for (std::size_t ii = 0; ii < inits.size(); ++ii) {
                    DiscretizedMeasure emp(kind, ell, bins);
                    for (std::size_t s = 0; s < S; ++s)
                        deposit(emp, states[((ii * S) + s) * times.size() + ti], 1.0 / S);
                    worst = std::max(worst, tv_distance(emp, target));
                }
                pt.tv.push_back(worst);
            }
            est.tv_curve.push_back(pt);
        }
        const std::size_t mid = opt.tv_bins.size() / 2;
        for (const auto& pt : est.tv_curve)
            if (pt.tv[mid] <= opt.epsilon) {
                est.t_mix_tv = pt.time;
                break;
            }
    }
    return est;
}

std::string MixingEstimate::to_json() const
{
    using nlohmann::ordered_json;
    auto num = [](double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); };
    ordered_json j;
    if (kind.is_instantaneous())
        j["params"] = {{"kind", "instantaneous"}, {"omega", kind.omega()}, {"ell", ell}};
    else
        j["params"] = {{"kind", "finite"}, {"alpha", kind.alpha()}, {"beta", kind.beta()}, {"ell", ell}};
    j["epsilon"] = epsilon;
    j["replicas"] = replicas;
    j["seed"] = seed;
    j["scale"] = mixing_scale(kind, ell);
    j["t_mix_coupling"] = num(t_mix_coupling);
    j["t_mix_tv"] = num(t_mix_tv);
    j["coupling_quantiles"] = {{"q50", num(q50)}, {"q90", num(q90)}, {"q_eps", num(q_eps)},
                               {"q_eps_ci95", {num(q_eps_lo), num(q_eps_hi)}}};
    j["censored"] = censored;
    auto pairs = ordered_json::array();
    for (std::size_t i = 0; i < worst.size(); ++i) {
        const auto& w = worst[i];
        pairs.push_back({{"a", {w.a.x, w.a.sigma.s1, w.a.sigma.s2}},
                         {"b", {w.b.x, w.b.sigma.s1, w.b.sigma.s2}},
                         {"q_eps", num(pair_quantiles[i])}});
    }
    j["worst_pairs"] = pairs;
    j["tv_bins"] = tv_bins;
    auto curve = ordered_json::array();
    for (const auto& pt : tv_curve)
        curve.push_back({{"t", pt.time}, {"tv", pt.tv}});
    j["tv_curve"] = curve;
    return j.dump(2);
}

} // namespace rtp
