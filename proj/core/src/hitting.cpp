#include "rtp/hitting.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "rtp/parallel.hpp"
#include "rtp/stats.hpp"

namespace rtp {

namespace {

bool instantaneous_pair(VelocityPair s)
{
    return (s.s1 == 1 || s.s1 == -1) && (s.s2 == 1 || s.s2 == -1);
}

int diagonal_slot(VelocityPair s) { return 1 - s.s1; } // (1,1)->0, (0,0)->1, (-1,-1)->2

} // namespace

double mean_hitting_time_citp(double x, VelocityPair sigma, double omega, double ell)
{
    if (!(omega > 0.0) || !(ell > 0.0))
        throw std::invalid_argument("omega and ell must be > 0");
    if (!instantaneous_pair(sigma))
        throw std::invalid_argument("velocity pair outside {-1,1}^2");
    if (x < 0.0 || x > ell)
        throw std::out_of_range("x outside [0, ell]");
    const double w = omega;
    const double g = 2.0 * ell * x - x * x;
    if (sigma.s1 == 1 && sigma.s2 == -1)
        return (4.0 * x + g * w) / 2.0;
    if (sigma.s1 == -1 && sigma.s2 == 1)
        return (4.0 * ell * w + g * w * w + 4.0) / (2.0 * w);
    return (2.0 * (ell + x) * w + g * w * w + 3.0) / (2.0 * w);
}

HittingBound hitting_bound_citp(double omega, double ell)
{
    HittingBound best{-1.0, 0.0, {1, 1}};
    // Each closed form is a concave quadratic in x with vertex at x = ell (or beyond): candidates 0, ell.
    for (VelocityPair s : {VelocityPair{1, 1}, VelocityPair{1, -1}, VelocityPair{-1, 1}, VelocityPair{-1, -1}})
        for (double x : {0.0, ell}) {
            const double v = mean_hitting_time_citp(x, s, omega, ell);
            if (v > best.value)
                best = {v, x, s};
        }
    return best;
}

double mean_velocity_coupling_time_cftp(int s0, int s0_tilde, double alpha, double beta)
{
    const TumbleKind kind = TumbleKind::finite(alpha, beta);
    kind.index_of(s0);
    kind.index_of(s0_tilde);
    if (s0 == s0_tilde)
        return 0.0;
    const double r = alpha / beta;
    if (std::abs(s0 - s0_tilde) == 1)
        return (1.0 / alpha) * (4.0 * r + 1.0) / (4.0 * r + 2.0);
    return (1.0 / alpha) * (3.0 * r + 1.0) / (2.0 * r + 1.0);
}

DiagonalReturnStatistics diagonal_return_statistics(double alpha, double beta)
{
    const TumbleKind kind = TumbleKind::finite(alpha, beta);
    const Eigen::MatrixXd q = pair_generator(kind);
    const auto pairs = pair_alphabet(kind);
    const double r = alpha / beta;
    const double scale = 1.0 / alpha + 1.0 / beta;
    DiagonalReturnStatistics out;
    for (const VelocityPair& s : pairs) {
        double v;
        if (s.s1 == 0 && s.s2 == 0)
            v = scale * (2.0 * r * r + 5.0 * r + 1.0) / (4.0 * r * r + 6.0 * r + 2.0);
        else if (s.s1 == 0 || s.s2 == 0)
            v = scale * (4.0 * r + 1.0) / (4.0 * r * r + 6.0 * r + 2.0);
        else
            v = scale * (3.0 * r + 1.0) / (2.0 * r * r + 3.0 * r + 1.0);
        out.mean_return.push_back(v);
    }

    // First-step analysis on the off-diagonal states.
    std::vector<int> off;
    for (int i = 0; i < 9; ++i)
        if (!pairs[i].on_diagonal())
            off.push_back(i);
    const int n = static_cast<int>(off.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd bh(n);
    Eigen::MatrixXd bg = Eigen::MatrixXd::Zero(n, 3);
    auto off_slot = [&](int i) { return static_cast<int>(std::find(off.begin(), off.end(), i) - off.begin()); };
    for (int k = 0; k < n; ++k) {
        const int i = off[k];
        const double out_rate = -q(i, i);
        bh(k) = 1.0 / out_rate;
        for (int j = 0; j < 9; ++j) {
            if (j == i || q(i, j) == 0.0)
                continue;
            const double p = q(i, j) / out_rate;
            if (pairs[j].on_diagonal())
                bg(k, diagonal_slot(pairs[j])) += p;
            else
                a(k, off_slot(j)) -= p;
        }
    }
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    const Eigen::VectorXd h = lu.solve(bh);
    const Eigen::MatrixXd g = lu.solve(bg);
    out.mean_return_solved.resize(9);
    out.hit_law.resize(9);
    for (int i = 0; i < 9; ++i) {
        if (!pairs[i].on_diagonal()) {
            const int k = off_slot(i);
            out.mean_return_solved[i] = h(k);
            out.hit_law[i] = {g(k, 0), g(k, 1), g(k, 2)};
            continue;
        }
        const double out_rate = -q(i, i);
        double m = 1.0 / out_rate;
        DiagonalLaw law{0.0, 0.0, 0.0};
        for (int j = 0; j < 9; ++j) {
            if (j == i || q(i, j) == 0.0)
                continue;
            const double p = q(i, j) / out_rate;
            const int k = off_slot(j);
            m += p * h(k);
            for (int d = 0; d < 3; ++d)
                law[d] += p * g(k, d);
        }
        out.mean_return_solved[i] = m;
        out.hit_law[i] = law;
    }
    out.displayed_hit_law = {beta / (2.0 * alpha + beta), 2.0 * alpha / (2.0 * alpha + beta),
                             beta / (2.0 * alpha + beta)};
    out.per_step_mean = (alpha + beta) * (alpha + beta) / (2.0 * alpha * alpha * beta + alpha * beta * beta);
    const int diag_index[3] = {pair_index(kind, {1, 1}), pair_index(kind, {0, 0}), pair_index(kind, {-1, -1})};
    for (int i = 0; i < 9; ++i) {
        double m = 0.0;
        for (int d = 0; d < 3; ++d)
            m += out.hit_law[i][d] * out.mean_return_solved[diag_index[d]];
        out.per_step_mean_solved.push_back(m);
    }
    return out;
}

namespace {

struct Quartic {
    double c4, c2, c0;
};

Quartic denominator(double a, double b)
{
    const double k = 2.0 * a * a + 3.0 * a * b + b * b;
    const double c0 = 4.0 * a * a * a * a + 4.0 * a * a * a * b + a * a * b * b;
    return {4.0, -4.0 * k, c0};
}

} // namespace

double excursion_mgf_pole(double alpha, double beta)
{
    if (!(alpha > 0.0) || !(beta > 0.0))
        throw std::invalid_argument("alpha and beta must be > 0");
    const Quartic d = denominator(alpha, beta);
    // c4 u^2 + c2 u + c0 = 0 in u = lambda^2.
    const double disc = d.c2 * d.c2 - 4.0 * d.c4 * d.c0;
    if (disc < 0.0)
        return std::numeric_limits<double>::infinity();
    const double sq = std::sqrt(disc);
    // Stable smaller root.
    const double big = (-d.c2 + sq) / (2.0 * d.c4);
    const double small = d.c0 / (d.c4 * big);
    return small > 0.0 ? small : big;
}

double excursion_mgf(double lambda, double alpha, double beta)
{
    const double pole = excursion_mgf_pole(alpha, beta);
    if (std::abs(lambda) >= std::sqrt(pole) - 1e-9)
        throw std::domain_error("lambda at or beyond the first pole of the excursion MGF");
    const double a = alpha;
    const double b = beta;
    const double l2 = lambda * lambda;
    const double c0 = 4.0 * a * a * a * a + 4.0 * a * a * a * b + a * a * b * b;
    const double k = 2.0 * a * a + 3.0 * a * b + b * b;
    return (c0 - 2.0 * k * l2) / (c0 + 4.0 * l2 * l2 - 4.0 * k * l2);
}

std::array<double, 4> excursion_moments(double alpha, double beta)
{
    const double a = alpha;
    const double b = beta;
    return {0.0, 4.0 * (a + b) / (2.0 * a * a * a + a * a * b), 0.0,
            96.0 * (a * a + 4.0 * a * b + 2.0 * b * b) /
                (4.0 * std::pow(a, 6) + 4.0 * std::pow(a, 5) * b + std::pow(a, 4) * b * b)};
}

ExcursionSample sample_diagonal_excursions(double alpha, double beta, VelocityPair start, std::size_t n,
                                           std::uint64_t seed)
{
    const TumbleKind kind = TumbleKind::finite(alpha, beta);
    if (!contains(kind, start) || !start.on_diagonal())
        throw std::invalid_argument("excursions start on the diagonal");
    PairVelocitySampler sampler(kind, start, Stream(seed, 0, StreamRole::particle1),
                                Stream(seed, 0, StreamRole::particle2));
    ExcursionSample out;
    out.d.reserve(n);
    out.duration.reserve(n);
    double t_prev = 0.0;
    double last = 0.0;
    double integral = 0.0;
    VelocityPair sigma = start;
    while (out.d.size() < n) {
        const VelocityEvent ev = sampler.advance();
        integral += sigma.relative_speed() * (ev.time - last);
        last = ev.time;
        sigma = ev.sigma;
        if (sigma.on_diagonal()) {
            out.d.push_back(integral);
            out.duration.push_back(ev.time - t_prev);
            ++out.hits[diagonal_slot(sigma)];
            t_prev = ev.time;
            integral = 0.0;
        }
    }
    return out;
}

double lag1_autocorrelation(const std::vector<double>& v)
{
    if (v.size() < 3)
        throw std::invalid_argument("autocorrelation needs at least 3 values");
    const MeanEstimate m = mean_estimate(v);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        den += (v[i] - m.mean) * (v[i] - m.mean);
        if (i + 1 < v.size())
            num += (v[i] - m.mean) * (v[i + 1] - m.mean);
    }
    return den > 0.0 ? num / den : 0.0;
}

ZeroExcursionCheck zero_excursion_law_check(double alpha, std::size_t n, std::uint64_t seed, double beta)
{
    if (n < 3)
        throw std::invalid_argument("at least 3 excursions required");
    const TumbleKind kind = TumbleKind::finite(alpha, beta);
    SingleVelocitySampler p(kind, 0, Stream(seed, 0, StreamRole::particle1));
    std::vector<double> d;
    d.reserve(n);
    double last = 0.0;
    double integral = 0.0;
    int s = 0;
    while (d.size() < n) {
        const double t = p.next_time();
        integral += s * (t - last);
        last = t;
        s = p.advance();
        if (s == 0) {
            d.push_back(integral);
            integral = 0.0;
        }
    }
    ZeroExcursionCheck out{};
    out.n = n;
    out.ks_critical = 1.36 / std::sqrt(static_cast<double>(n));
    out.lag1_autocorrelation = lag1_autocorrelation(d);
    std::vector<double> sq(n);
    std::size_t pos = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sq[i] = d[i] * d[i];
        pos += d[i] > 0.0;
    }
    const MeanEstimate m2 = mean_estimate(sq);
    out.second_moment = m2.mean;
    out.second_moment_stderr = m2.stderr_;
    out.fraction_positive = static_cast<double>(pos) / n;
    std::sort(d.begin(), d.end());
    auto cdf = [alpha](double x) { return x < 0.0 ? 0.5 * std::exp(alpha * x) : 1.0 - 0.5 * std::exp(-alpha * x); };
    double ks = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double f = cdf(d[i]);
        ks = std::max({ks, std::abs(f - static_cast<double>(i) / n), std::abs(static_cast<double>(i + 1) / n - f)});
    }
    out.ks = ks;
    return out;
}

namespace {

double hit_jam_at_zero(const TumbleKind& kind, double ell, const ContState& start, std::uint64_t seed,
                       std::uint64_t replica)
{
    const VelocityPair target{1, -1};
    ContinuousSimulator sim({ell, kind}, start, seed, replica);
    const double inf = std::numeric_limits<double>::infinity();
    while (auto seg = sim.next_segment(inf)) {
        if (seg->sigma == target && seg->clamp && seg->clamp->boundary == Boundary::zero)
            return seg->t0 + seg->clamp->time;
    }
    return inf;
}

double velocity_agreement_time(const TumbleKind& kind, int s0, int s1, std::uint64_t seed, std::uint64_t replica)
{
    if (s0 == s1)
        return 0.0;
    SingleVelocitySampler a(kind, s0, Stream(seed, replica, StreamRole::particle1));
    SingleVelocitySampler b(kind, s1, Stream(seed, replica, StreamRole::particle1_shadow));
    for (;;) {
        double t;
        if (a.next_time() <= b.next_time()) {
            t = a.next_time();
            a.advance();
        } else {
            t = b.next_time();
            b.advance();
        }
        if (a.state() == b.state())
            return t;
    }
}

double diagonal_return_time(const TumbleKind& kind, VelocityPair start, std::uint64_t seed, std::uint64_t replica)
{
    PairVelocitySampler sampler(kind, start, Stream(seed, replica, StreamRole::particle1),
                                Stream(seed, replica, StreamRole::particle2));
    bool left = !start.on_diagonal();
    for (;;) {
        const VelocityEvent ev = sampler.advance();
        if (!ev.sigma.on_diagonal())
            left = true;
        else if (left)
            return ev.time;
    }
}

} // namespace

MonteCarloEstimate monte_carlo_hitting(const TumbleKind& kind, double ell, const HittingQuery& query,
                                       std::size_t replicas, std::uint64_t seed, int workers)
{
    if (replicas < 1)
        throw std::invalid_argument("replicas must be >= 1");
    std::vector<double> v(replicas);
    parallel_for(replicas, workers, [&](std::size_t i) {
        v[i] = std::visit(
            [&](const auto& q) -> double {
                using Q = std::decay_t<decltype(q)>;
                if constexpr (std::is_same_v<Q, JamAtZero>)
                    return hit_jam_at_zero(kind, ell, q.start, seed, i);
                else if constexpr (std::is_same_v<Q, VelocityAgreement>)
                    return velocity_agreement_time(kind, q.s0, q.s0_tilde, seed, i);
                else
                    return diagonal_return_time(kind, q.start, seed, i);
            },
            query);
    });
    const MeanEstimate m = mean_estimate(v);
    return {m.mean, m.stderr_, replicas};
}

namespace {

std::string pair_text(VelocityPair s)
{
    std::ostringstream os;
    os << '(' << s.s1 << ',' << s.s2 << ')';
    return os.str();
}

OracleRow make_row(std::string query, double closed, const MonteCarloEstimate& mc)
{
    const double z = mc.stderr_ > 0.0 ? (mc.mean - closed) / mc.stderr_ : (mc.mean == closed ? 0.0 : INFINITY);
    return {std::move(query), closed, mc.mean, mc.stderr_, z};
}

} // namespace

std::vector<OracleRow> hitting_oracle_table(const OracleTableConfig& cfg)
{
    std::vector<OracleRow> rows;
    std::uint64_t qid = 0;
    for (auto [omega, ell] : cfg.citp_points) {
        const TumbleKind kind = TumbleKind::instantaneous(omega);
        for (VelocityPair s : pair_alphabet(kind)) {
            const double x = 0.5 * ell;
            std::ostringstream name;
            name << "jam_at_zero citp omega=" << omega << " ell=" << ell << " x=" << x << " sigma=" << pair_text(s);
            rows.push_back(make_row(name.str(), mean_hitting_time_citp(x, s, omega, ell),
                                    monte_carlo_hitting(kind, ell, JamAtZero{{x, s}}, cfg.replicas,
                                                        derive_seed(cfg.seed, {++qid}), cfg.workers)));
        }
    }
    for (auto [alpha, beta] : cfg.cftp_points) {
        const TumbleKind kind = TumbleKind::finite(alpha, beta);
        for (auto [s0, s1] : {std::pair{-1, 1}, std::pair{1, 0}}) {
            std::ostringstream name;
            name << "velocity_agreement cftp alpha=" << alpha << " beta=" << beta << " s=" << s0 << " s~=" << s1;
            rows.push_back(make_row(name.str(), mean_velocity_coupling_time_cftp(s0, s1, alpha, beta),
                                    monte_carlo_hitting(kind, 1.0, VelocityAgreement{s0, s1}, cfg.replicas,
                                                        derive_seed(cfg.seed, {++qid}), cfg.workers)));
        }
        const DiagonalReturnStatistics st = diagonal_return_statistics(alpha, beta);
        for (VelocityPair s : {VelocityPair{0, 0}, VelocityPair{1, 0}, VelocityPair{1, -1}, VelocityPair{1, 1}}) {
            std::ostringstream name;
            name << "diagonal_return cftp alpha=" << alpha << " beta=" << beta << " sigma=" << pair_text(s);
            rows.push_back(make_row(name.str(), st.mean_return[pair_index(kind, s)],
                                    monte_carlo_hitting(kind, 1.0, DiagonalReturn{s}, cfg.replicas,
                                                        derive_seed(cfg.seed, {++qid}), cfg.workers)));
        }
        const ExcursionSample ex =
            sample_diagonal_excursions(alpha, beta, {0, 0}, cfg.replicas, derive_seed(cfg.seed, {++qid}));
        {
            std::ostringstream name;
            name << "per_step_mean cftp alpha=" << alpha << " beta=" << beta;
            const MeanEstimate m = mean_estimate(ex.duration);
            rows.push_back(make_row(name.str(), st.per_step_mean, {m.mean, m.stderr_, m.n}));
        }
        {
            std::ostringstream name;
            name << "excursion_second_moment cftp alpha=" << alpha << " beta=" << beta;
            std::vector<double> sq(ex.d.size());
            for (std::size_t i = 0; i < sq.size(); ++i)
                sq[i] = ex.d[i] * ex.d[i];
            const MeanEstimate m = mean_estimate(sq);
            rows.push_back(make_row(name.str(), excursion_moments(alpha, beta)[1], {m.mean, m.stderr_, m.n}));
        }
    }
    return rows;
}

} // namespace rtp
