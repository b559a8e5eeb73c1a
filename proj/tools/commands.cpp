#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>

#include <json.hpp>

#include "rtp/acceptance.hpp"
#include "rtp/coupling.hpp"
#include "rtp/hitting.hpp"
#include "rtp/lattice.hpp"
#include "rtp/measures.hpp"
#include "rtp/mixing.hpp"
#include "rtp/pdmp.hpp"

namespace rtp::cli {

namespace {

bool is_discrete(const std::string& kind) { return kind == "ditp" || kind == "dftp"; }
bool is_instantaneous(const std::string& kind) { return kind == "citp" || kind == "ditp"; }

double single(const std::vector<double>& v, const char* name)
{
    if (v.size() != 1)
        throw ConfigError(std::string("--") + name + " takes exactly one value for this subcommand");
    return v.front();
}

TumbleKind tumble(const Options& o)
{
    try {
        if (is_instantaneous(o.kind))
            return TumbleKind::instantaneous(single(o.omega, "omega"));
        return TumbleKind::finite(single(o.alpha, "alpha"), single(o.beta, "beta"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

std::uint64_t need_seed(const Options& o)
{
    if (!o.seed)
        throw ConfigError("--seed is required for this subcommand");
    return *o.seed;
}

double positive(double v, const char* name)
{
    if (!(v > 0.0) || !std::isfinite(v))
        throw ConfigError(std::string("--") + name + " must be > 0");
    return v;
}

VelocityPair initial_pair(const Options& o, const TumbleKind& kind)
{
    const VelocityPair s{o.s1, o.s2};
    if (!contains(kind, s))
        throw ConfigError("--s1/--s2 outside the velocity alphabet");
    return s;
}

LatticeParams lattice(const Options& o, const TumbleKind& kind, double ell)
{
    if (o.L < 2)
        throw ConfigError("--L must be >= 2");
    if (o.gamma)
        return LatticeParams::with_rate(o.L, positive(*o.gamma, "gamma"), kind, ell);
    return LatticeParams::scaled_chain(o.L, ell, kind);
}

ContState continuous_init(const Options& o, const TumbleKind& kind, double ell)
{
    const double x = o.x0.value_or(0.5 * ell);
    if (!(x >= 0.0 && x <= ell))
        throw ConfigError("--x0 must lie in [0, ell]");
    return {x, initial_pair(o, kind)};
}

LatticeState discrete_init(const Options& o, const TumbleKind& kind)
{
    const int y = o.y0.value_or((o.L + 1) / 2);
    if (y < 1 || y > o.L)
        throw ConfigError("--y0 must lie in {1..L}");
    return {y, initial_pair(o, kind)};
}

} // namespace

void cmd_simulate(const Options& o, std::ostream& out)
{
    const std::uint64_t seed = need_seed(o);
    const TumbleKind kind = tumble(o);
    const double ell = positive(single(o.ell, "ell"), "ell");
    const double horizon = positive(o.horizon, "horizon");
    if (is_discrete(o.kind)) {
        const LatticeParams p = lattice(o, kind, ell);
        const DiscreteTrajectory tr = simulate_discrete(p, discrete_init(o, kind), horizon, seed);
        out << "t,y,s1,s2\n" << std::setprecision(17);
        out << 0.0 << ',' << tr.initial.y << ',' << tr.initial.sigma.s1 << ',' << tr.initial.sigma.s2 << '\n';
        for (const LatticeChange& c : tr.changes)
            out << c.time << ',' << c.state.y << ',' << c.state.sigma.s1 << ',' << c.state.sigma.s2 << '\n';
        return;
    }
    const ContinuousRun run = simulate_continuous({ell, kind}, continuous_init(o, kind, ell), horizon, seed);
    run.path.write_csv(out);
}

void cmd_invariant(const Options& o, std::ostream& out)
{
    const TumbleKind kind = tumble(o);
    const double ell = positive(single(o.ell, "ell"), "ell");
    if (o.compare_horizon)
        positive(*o.compare_horizon, "compare-horizon");
    const std::uint64_t seed = o.compare_horizon ? need_seed(o) : 0;
    if (is_discrete(o.kind)) {
        const LatticeParams p = lattice(o, kind, ell);
        const StationaryVector pi = stationary_distribution(p);
        if (!o.compare_horizon) {
            write_stationary_csv(out, pi);
            return;
        }
        const DiscreteOccupation occ = discrete_occupation(p, discrete_init(o, kind), *o.compare_horizon, seed);
        const double tv = total_variation(occ.fraction, pi.values());
        out << "# residual=" << std::setprecision(17) << pi.residual() << '\n' << "y,s1,s2,prob,empirical,tv\n";
        for (int i = 0; i < p.state_count(); ++i) {
            const LatticeState s = state_at_index(p, i);
            out << s.y << ',' << s.sigma.s1 << ',' << s.sigma.s2 << ',' << pi.values()[i] << ',' << occ.fraction[i]
                << ',' << tv << '\n';
        }
        return;
    }
    const AtomicDensityMeasure m = invariant_measure(kind, ell);
    if (!o.compare_horizon) {
        out << m.to_json() << '\n';
        return;
    }
    if (o.bins < 1)
        throw ConfigError("--bins must be >= 1");
    const OccupationAccumulator acc =
        stream_occupation({ell, kind}, continuous_init(o, kind, ell), *o.compare_horizon, o.bins, seed);
    const DiscretizedMeasure a = m.discretize(o.bins);
    const DiscretizedMeasure e = acc.measure();
    const double tv = tv_distance(e, a);
    out << "bin_lo,bin_hi,atom,s1,s2,analytic,empirical,tv\n" << std::setprecision(17);
    const double w = a.bin_width();
    for (int p = 0; p < a.pair_count(); ++p) {
        const VelocityPair s = pair_at(kind, p);
        out << 0.0 << ',' << 0.0 << ",0," << s.s1 << ',' << s.s2 << ',' << a.atom_zero(p) << ',' << e.atom_zero(p)
            << ',' << tv << '\n';
        for (int b = 0; b < a.bins(); ++b)
            out << b * w << ',' << (b + 1) * w << ",," << s.s1 << ',' << s.s2 << ',' << a.bulk(p, b) << ','
                << e.bulk(p, b) << ',' << tv << '\n';
        out << ell << ',' << ell << ",ell," << s.s1 << ',' << s.s2 << ',' << a.atom_ell(p) << ',' << e.atom_ell(p)
            << ',' << tv << '\n';
    }
}

void cmd_converge(const Options& o, std::ostream& out)
{
    const std::uint64_t seed = need_seed(o);
    if (is_discrete(o.kind))
        throw ConfigError("converge couples a continuous kind (citp or cftp) with its lattice chains");
    if (o.Ls.empty())
        throw ConfigError("--Ls needs at least one lattice size");
    for (int L : o.Ls)
        if (L < 2)
            throw ConfigError("every entry of --Ls must be >= 2");
    if (o.replicas < 1)
        throw ConfigError("--replicas must be >= 1");
    ConvergenceConfig cfg{tumble(o),
                          positive(single(o.ell, "ell"), "ell"),
                          positive(o.T, "T"),
                          positive(o.epsilon, "epsilon"),
                          o.replicas,
                          seed,
                          o.w1,
                          o.w1_bins,
                          o.workers};
    out << "L,replicas,median_deviation,q90_deviation,p_exceed,bound,w1\n" << std::setprecision(17);
    for (int L : o.Ls) {
        const ConvergenceRow r = convergence_row(cfg, L);
        out << r.L << ',' << r.replicas << ',' << r.median_deviation << ',' << r.q90_deviation << ',' << r.p_exceed
            << ',' << r.bound << ',';
        if (std::isfinite(r.w1))
            out << r.w1;
        out << '\n';
    }
}

void cmd_mixing(const Options& o, std::ostream& out)
{
    const std::uint64_t seed = need_seed(o);
    if (is_discrete(o.kind))
        throw ConfigError("mixing runs on a continuous kind (citp or cftp)");
    MixingOptions m;
    m.epsilon = o.epsilon;
    m.replicas = o.replicas;
    m.pilot_replicas = o.pilot_replicas;
    m.worst_pairs = o.worst_pairs;
    m.tv_samples = o.tv_samples;
    m.cap_factor = o.cap_factor;
    m.workers = o.workers;
    if (!(m.epsilon > 0.0 && m.epsilon < 1.0))
        throw ConfigError("--epsilon must lie in (0, 1)");
    std::vector<TumbleKind> kinds;
    try {
        if (is_instantaneous(o.kind))
            for (double w : o.omega)
                kinds.push_back(TumbleKind::instantaneous(w));
        else
            for (double a : o.alpha)
                for (double b : o.beta)
                    kinds.push_back(TumbleKind::finite(a, b));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    auto all = nlohmann::ordered_json::array();
    std::uint64_t point = 0;
    for (const TumbleKind& k : kinds)
        for (double ell : o.ell) {
            positive(ell, "ell");
            const MixingEstimate e = estimate_mixing_time(k, ell, m, derive_seed(seed, {point++}));
            auto j = nlohmann::ordered_json::parse(e.to_json());
            j["scale"] = mixing_scale(k, ell);
            j["ratio"] = e.t_mix_coupling / mixing_scale(k, ell);
            all.push_back(std::move(j));
        }
    out << all.dump(2) << '\n';
}

void cmd_hitting(const Options& o, std::ostream& out)
{
    OracleTableConfig cfg;
    cfg.seed = need_seed(o);
    if (o.replicas < 2)
        throw ConfigError("--replicas must be >= 2");
    cfg.replicas = static_cast<std::size_t>(o.replicas);
    cfg.workers = o.workers;
    const std::vector<OracleRow> rows = hitting_oracle_table(cfg);
    out << "query,closed_form,mc_mean,mc_stderr,z\n" << std::setprecision(17);
    for (const OracleRow& r : rows)
        out << '"' << r.query << "\"," << r.closed_form << ',' << r.mc_mean << ',' << r.mc_stderr << ',' << r.z
            << '\n';
}

bool cmd_verify(const Options& o, std::ostream& out)
{
    AcceptanceOptions a;
    if (o.seed)
        a.seed = *o.seed;
    a.workers = o.workers;
    a.only = o.only;
    for (int id : a.only)
        if (id < 1 || id > 9)
            throw ConfigError("--only entries must lie in 1..9");
    a.on_result = [&out](const CriterionResult& r) { out << format_result(r) << std::endl; };
    bool ok = true;
    for (const CriterionResult& r : run_acceptance(a))
        ok = ok && r.passed;
    return ok;
}

} // namespace rtp::cli
