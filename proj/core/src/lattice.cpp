#include "rtp/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include <Eigen/SparseLU>

namespace rtp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double first_ring(Stream& rng, double rate, double t0)
{
    return rate > 0.0 ? t0 + rng.exponential(rate) : kInf;
}

} // namespace

LatticeParams LatticeParams::scaled_chain(int L, double ell, const TumbleKind& kind)
{
    LatticeParams p{L, ell, 0.0, kind, true};
    if (!(ell > 0.0))
        throw std::invalid_argument("ell must be > 0");
    p.gamma = (L - 1) / ell;
    p.validate();
    return p;
}

LatticeParams LatticeParams::with_rate(int L, double gamma, const TumbleKind& kind, double ell)
{
    LatticeParams p{L, ell, gamma, kind, false};
    p.validate();
    return p;
}

void LatticeParams::validate() const
{
    if (L < 2)
        throw std::invalid_argument("L must be >= 2");
    if (!(ell > 0.0))
        throw std::invalid_argument("ell must be > 0");
    if (!(gamma >= 0.0) || !std::isfinite(gamma))
        throw std::invalid_argument("gamma must be finite and >= 0");
    if (scaled && std::abs(gamma * ell - (L - 1)) > 1e-9 * (L - 1))
        throw std::invalid_argument("scaled chain requires gamma * ell = L - 1");
}

LatticeState step_discrete(const LatticeState& state, Clock which, int L)
{
    LatticeState next = state;
    if (which == Clock::first)
        next.y = clamp_site(state.y - state.sigma.s1, L);
    else
        next.y = clamp_site(state.y + state.sigma.s2, L);
    return next;
}

int state_index(const LatticeParams& params, const LatticeState& state)
{
    if (state.y < 1 || state.y > params.L)
        throw std::out_of_range("site outside {1..L}");
    return (state.y - 1) * params.kind.pair_count() + pair_index(params.kind, state.sigma);
}

LatticeState state_at_index(const LatticeParams& params, int index)
{
    const int m = params.kind.pair_count();
    if (index < 0 || index >= params.L * m)
        throw std::out_of_range("state index out of range");
    return {index / m + 1, pair_at(params.kind, index % m)};
}

DiscreteSimulator::DiscreteSimulator(const LatticeParams& params, const LatticeState& init, std::uint64_t seed,
                                     std::uint64_t replica)
    : DiscreteSimulator(params, init, Stream(seed, replica, StreamRole::particle1),
                        Stream(seed, replica, StreamRole::particle2), Stream(seed, replica, StreamRole::ring1),
                        Stream(seed, replica, StreamRole::ring2))
{
}

DiscreteSimulator::DiscreteSimulator(const LatticeParams& params, const LatticeState& init, Stream particle1,
                                     Stream particle2, Stream ring1, Stream ring2)
    : params_(params), state_(init), velocity_(params.kind, init.sigma, std::move(particle1), std::move(particle2)),
      ring1_(std::move(ring1)), ring2_(std::move(ring2))
{
    params_.validate();
    state_index(params_, init);
    next_ring1_ = first_ring(ring1_, params_.gamma, 0.0);
    next_ring2_ = first_ring(ring2_, params_.gamma, 0.0);
}

double DiscreteSimulator::next_event_time() const noexcept
{
    return std::min({velocity_.next_time(), next_ring1_, next_ring2_});
}

LatticeEventType DiscreteSimulator::step(double horizon)
{
    const double tv = velocity_.next_time();
    const double t1 = next_ring1_;
    const double t2 = next_ring2_;
    const double t = std::min({tv, t1, t2});
    if (t > horizon) {
        time_ = std::max(time_, horizon);
        return LatticeEventType::none;
    }
    time_ = t;
    if (t == tv) {
        velocity_.advance();
        state_.sigma = velocity_.state();
        return LatticeEventType::velocity;
    }
    if (t == t1) {
        state_ = step_discrete(state_, Clock::first, params_.L);
        next_ring1_ += ring1_.exponential(params_.gamma);
        return LatticeEventType::ring1;
    }
    state_ = step_discrete(state_, Clock::second, params_.L);
    next_ring2_ += ring2_.exponential(params_.gamma);
    return LatticeEventType::ring2;
}

LatticeState DiscreteTrajectory::state_at(double t) const
{
    if (t < 0.0 || t > horizon)
        throw std::out_of_range("time outside trajectory horizon");
    auto it = std::upper_bound(changes.begin(), changes.end(), t,
                               [](double v, const LatticeChange& c) { return v < c.time; });
    return it == changes.begin() ? initial : std::prev(it)->state;
}

DiscreteTrajectory simulate_discrete(const LatticeParams& params, const LatticeState& init, double horizon,
                                     std::uint64_t seed, std::uint64_t replica)
{
    if (!(horizon > 0.0))
        throw std::invalid_argument("horizon must be > 0");
    DiscreteSimulator sim(params, init, seed, replica);
    DiscreteTrajectory traj{init, {}, horizon, 0};
    LatticeState prev = init;
    while (sim.step(horizon) != LatticeEventType::none) {
        ++traj.event_count;
        if (!(sim.state() == prev)) {
            traj.changes.push_back({sim.time(), sim.state()});
            prev = sim.state();
        }
    }
    return traj;
}

namespace {

template <class Stop>
DiscreteOccupation occupation_impl(const LatticeParams& params, const LatticeState& init, double horizon,
                                   std::uint64_t seed, std::uint64_t replica, Stop stop)
{
    DiscreteSimulator sim(params, init, seed, replica);
    DiscreteOccupation occ{std::vector<double>(params.state_count(), 0.0), 0};
    int idx = state_index(params, init);
    double last = 0.0;
    while (!stop(occ.event_count)) {
        const auto ev = sim.step(horizon);
        occ.fraction[idx] += sim.time() - last;
        last = sim.time();
        if (ev == LatticeEventType::none)
            break;
        ++occ.event_count;
        idx = state_index(params, sim.state());
    }
    if (!(last > 0.0))
        throw std::invalid_argument("occupation over an empty time interval");
    for (auto& v : occ.fraction)
        v /= last;
    return occ;
}

} // namespace

DiscreteOccupation discrete_occupation(const LatticeParams& params, const LatticeState& init, double horizon,
                                       std::uint64_t seed, std::uint64_t replica)
{
    if (!(horizon > 0.0))
        throw std::invalid_argument("horizon must be > 0");
    return occupation_impl(params, init, horizon, seed, replica, [](std::uint64_t) { return false; });
}

DiscreteOccupation discrete_occupation_events(const LatticeParams& params, const LatticeState& init,
                                              std::uint64_t events, std::uint64_t seed, std::uint64_t replica)
{
    if (events == 0)
        throw std::invalid_argument("event budget must be > 0");
    return occupation_impl(params, init, kInf, seed, replica, [events](std::uint64_t n) { return n >= events; });
}

SparseGenerator discrete_generator(const LatticeParams& params)
{
    params.validate();
    const TumbleKind& kind = params.kind;
    const int m = kind.pair_count();
    const int n = params.state_count();
    const Eigen::MatrixXd q = pair_generator(kind);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(n) * 7);
    for (int i = 0; i < n; ++i) {
        const LatticeState s = state_at_index(params, i);
        const int a = i % m;
        double out = 0.0;
        for (int b = 0; b < m; ++b) {
            if (b == a || q(a, b) == 0.0)
                continue;
            trips.emplace_back(i, (s.y - 1) * m + b, q(a, b));
            out += q(a, b);
        }
        if (params.gamma > 0.0) {
            for (Clock c : {Clock::first, Clock::second}) {
                const LatticeState t = step_discrete(s, c, params.L);
                if (t.y != s.y) {
                    trips.emplace_back(i, state_index(params, t), params.gamma);
                    out += params.gamma;
                }
            }
        }
        trips.emplace_back(i, i, -out);
    }
    SparseGenerator g(n, n);
    g.setFromTriplets(trips.begin(), trips.end());
    return g;
}

double stationary_residual(const SparseGenerator& g, const std::vector<double>& pi)
{
    Eigen::Map<const Eigen::VectorXd> p(pi.data(), static_cast<Eigen::Index>(pi.size()));
    const Eigen::VectorXd r = g.transpose() * p;
    return r.cwiseAbs().maxCoeff();
}

StationaryVector::StationaryVector(const LatticeParams& params, std::vector<double> prob, double residual)
    : params_(params), prob_(std::move(prob)), residual_(residual)
{
    if (static_cast<int>(prob_.size()) != params_.state_count())
        throw std::invalid_argument("probability vector size does not match state space");
}

double StationaryVector::operator()(int y, VelocityPair sigma) const
{
    return prob_[state_index(params_, {y, sigma})];
}

StationaryVector stationary_distribution(const LatticeParams& params)
{
    const SparseGenerator g = discrete_generator(params);
    const int n = static_cast<int>(g.rows());
    // Pin the last component to 1 and solve the remaining rows of G^T pi = 0; a dense
    // normalization row would destroy the band structure of the y-major ordering.
    const Eigen::SparseMatrix<double> gt = g.transpose();
    const int m = n - 1;
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(gt.nonZeros());
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    for (int k = 0; k < gt.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(gt, k); it; ++it) {
            if (it.row() == m)
                continue;
            if (it.col() == m)
                rhs(it.row()) -= it.value();
            else
                trips.emplace_back(it.row(), it.col(), it.value());
        }
    Eigen::SparseMatrix<double> sys(m, m);
    sys.setFromTriplets(trips.begin(), trips.end());
    sys.makeCompressed();

    Eigen::VectorXd x(n);
    x(m) = 1.0;
    if (m > 0) {
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.analyzePattern(sys);
        lu.factorize(sys);
        if (lu.info() != Eigen::Success)
            throw std::runtime_error("stationary solve: factorization failed");
        Eigen::VectorXd y = lu.solve(rhs);
        for (int it = 0; it < 3; ++it) {
            const Eigen::VectorXd r = rhs - sys * y;
            if (r.cwiseAbs().maxCoeff() <= 1e-15 * y.cwiseAbs().maxCoeff())
                break;
            y += lu.solve(r);
        }
        x.head(m) = y;
    }
    std::vector<double> pi(n);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        pi[i] = std::max(0.0, x(i));
        total += pi[i];
    }
    for (auto& v : pi)
        v /= total;
    const double res = stationary_residual(g, pi);
    const double scale = std::max(1.0, params.gamma + params.kind.max_pair_exit_rate());
    if (!(res <= 1e-12 * scale))
        throw std::runtime_error("stationary solve: residual " + std::to_string(res) + " beyond tolerance");
    return StationaryVector(params, std::move(pi), res);
}

double embed_position(int k, int L, double ell)
{
    if (L < 2)
        throw std::invalid_argument("L must be >= 2");
    if (k < 1 || k > L)
        throw std::out_of_range("site outside {1..L}");
    return ell * (k - 1) / (L - 1);
}

int fold_p_L(std::int64_t z, int L)
{
    if (L < 1)
        throw std::invalid_argument("L must be >= 1");
    const std::int64_t period = 2 * static_cast<std::int64_t>(L);
    std::int64_t k = ((z - 1) % period + period) % period + 1; // 1..2L
    return static_cast<int>(k <= L ? k : period + 1 - k);
}

void write_stationary_csv(std::ostream& os, const StationaryVector& pi)
{
    const auto& p = pi.params();
    os << "# residual=" << pi.residual() << '\n';
    os << "y,s1,s2,prob\n";
    os.precision(17);
    for (int i = 0; i < p.state_count(); ++i) {
        const LatticeState s = state_at_index(p, i);
        os << s.y << ',' << s.sigma.s1 << ',' << s.sigma.s2 << ',' << pi.values()[i] << '\n';
    }
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q)
{
    if (p.size() != q.size())
        throw std::invalid_argument("total variation: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        s += std::abs(p[i] - q[i]);
    return 0.5 * s;
}

} // namespace rtp
