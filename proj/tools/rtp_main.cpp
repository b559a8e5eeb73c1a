#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "commands.hpp"
#include "rtp/parallel.hpp"

using rtp::cli::ConfigError;
using rtp::cli::Options;

namespace {

struct Sub {
    CLI::App* app;
    bool simulation;
};

void add_common(CLI::App* s, Options& o)
{
    s->add_option("--seed", o.seed, "Master seed; every replica derives its own streams from it");
    s->add_option("--workers", o.workers, "Worker threads (results do not depend on it); default $RTP_WORKERS or 1")
        ->check(CLI::PositiveNumber);
    s->add_option("--output,-o", o.output, "Output file, '-' for stdout");
}

void add_kind(CLI::App* s, Options& o, bool discrete_allowed)
{
    std::vector<std::string> kinds{"citp", "cftp"};
    if (discrete_allowed) {
        kinds.push_back("ditp");
        kinds.push_back("dftp");
    }
    s->add_option("--kind", o.kind, "Process kind")->check(CLI::IsMember(kinds));
    s->add_option("--omega", o.omega, "Instantaneous tumble rate")->delimiter(',');
    s->add_option("--alpha", o.alpha, "Finite tumble: rate of leaving +-1")->delimiter(',');
    s->add_option("--beta", o.beta, "Finite tumble: rate of leaving 0")->delimiter(',');
    s->add_option("--ell", o.ell, "Interval length")->delimiter(',');
}

void add_lattice(CLI::App* s, Options& o)
{
    s->add_option("--L", o.L, "Lattice size");
    s->add_option("--gamma", o.gamma, "Ring rate; default (L-1)/ell");
    s->add_option("--y0", o.y0, "Initial lattice site; default (L+1)/2");
}

void add_start(CLI::App* s, Options& o)
{
    s->add_option("--x0", o.x0, "Initial separation; default ell/2");
    s->add_option("--s1", o.s1, "Initial velocity of particle 1");
    s->add_option("--s2", o.s2, "Initial velocity of particle 2");
}

std::string option_value(const CLI::Option* opt)
{
    if (opt->count() == 0) {
        std::string d = opt->get_default_str();
        if (d.size() >= 2 && d.front() == '[' && d.back() == ']')
            d = d.substr(1, d.size() - 2);
        return d;
    }
    std::string v;
    for (const std::string& r : opt->results())
        v += (v.empty() ? "" : ",") + r;
    return v;
}

nlohmann::ordered_json resolved_config(const CLI::App* sub)
{
    nlohmann::ordered_json j;
    j["subcommand"] = sub->get_name();
    nlohmann::ordered_json opts = nlohmann::ordered_json::object();
    for (const CLI::Option* opt : sub->get_options()) {
        if (opt->get_lnames().empty())
            continue;
        const std::string name = opt->get_lnames().front();
        if (name == "help" || name == "output")
            continue;
        const std::string v = option_value(opt);
        if (!v.empty())
            opts[name] = v;
    }
    j["options"] = opts;
    return j;
}

// Expands "--config FILE" into the stored arguments; options given on the command line win.
std::vector<std::string> expand_config(std::vector<std::string> args)
{
    std::string path;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size())
                throw ConfigError("--config needs a file");
            path = args[i + 1];
            args.erase(args.begin() + i, args.begin() + i + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + i);
            break;
        }
    }
    if (path.empty())
        return args;
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read config " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config " + path + ": " + e.what());
    }
    if (!j.contains("subcommand") || !j.contains("options"))
        throw ConfigError("config " + path + " lacks subcommand/options");
    const std::string sub = j["subcommand"].get<std::string>();
    std::set<std::string> given;
    for (std::size_t i = 1; i < args.size(); ++i)
        if (args[i].rfind("--", 0) == 0)
            given.insert(args[i].substr(2, args[i].find('=') == std::string::npos ? std::string::npos
                                                                                   : args[i].find('=') - 2));
    std::vector<std::string> out{args[0]};
    std::size_t rest = 1;
    if (args.size() > 1 && args[1].rfind("-", 0) != 0) {
        if (args[1] != sub)
            throw ConfigError("config is for '" + sub + "', not '" + args[1] + "'");
        rest = 2;
    }
    out.push_back(sub);
    for (const auto& [k, v] : j["options"].items())
        if (!given.count(k))
            out.push_back("--" + k + "=" + (v.is_string() ? v.get<std::string>() : v.dump()));
    out.insert(out.end(), args.begin() + static_cast<std::ptrdiff_t>(rest), args.end());
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    Options o;
    o.workers = rtp::default_workers();
    CLI::App app{"Two jamming run-and-tumble particles: simulation, invariant measures, couplings and hitting times"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");
    app.option_defaults()->always_capture_default();

    std::vector<Sub> subs;
    auto* sim = app.add_subcommand("simulate", "Write one trajectory as CSV");
    add_common(sim, o);
    add_kind(sim, o, true);
    add_lattice(sim, o);
    add_start(sim, o);
    sim->add_option("--horizon", o.horizon, "Time horizon");
    subs.push_back({sim, true});

    auto* inv = app.add_subcommand("invariant", "Analytic invariant measure (JSON) or lattice stationary law (CSV)");
    add_common(inv, o);
    add_kind(inv, o, true);
    add_lattice(inv, o);
    add_start(inv, o);
    inv->add_option("--compare-horizon", o.compare_horizon, "Also simulate this long and compare occupations");
    inv->add_option("--bins", o.bins, "Bins per sheet for the comparison");
    subs.push_back({inv, false});

    auto* conv = app.add_subcommand("converge", "Lattice-to-continuum deviation, bound and W1 per lattice size");
    add_common(conv, o);
    add_kind(conv, o, false);
    conv->add_option("--Ls", o.Ls, "Lattice sizes, comma separated")->delimiter(',');
    conv->add_option("--T", o.T, "Time window of the sup-deviation");
    conv->add_option("--epsilon", o.epsilon, "Deviation threshold");
    conv->add_option("--replicas", o.replicas, "Coupled replicas per lattice size");
    conv->add_option("--w1", o.w1, "Also compute W1 between lattice and continuous laws");
    conv->add_option("--w1-bins", o.w1_bins, "Bins per sheet of the continuous law in the W1 solve");
    subs.push_back({conv, true});

    auto* mix = app.add_subcommand("mixing", "Coupling-based mixing-time estimates over a parameter grid (JSON)");
    add_common(mix, o);
    add_kind(mix, o, false);
    mix->add_option("--epsilon", o.epsilon, "TV level of the mixing time")->default_val(0.25);
    mix->add_option("--replicas", o.replicas, "Replicas per worst initial pair")->default_val(10000);
    mix->add_option("--pilot-replicas", o.pilot_replicas, "Replicas per pair in the screening pass");
    mix->add_option("--worst-pairs", o.worst_pairs, "Pairs re-run at full replica count");
    mix->add_option("--tv-samples", o.tv_samples, "Samples per initial state of the direct TV estimate; 0 disables");
    mix->add_option("--cap-factor", o.cap_factor, "Censoring time in multiples of the regime scale");
    subs.push_back({mix, true});

    auto* hit = app.add_subcommand("hitting", "Closed-form hitting and return times against Monte Carlo (CSV)");
    add_common(hit, o);
    hit->add_option("--replicas", o.replicas, "Monte Carlo replicas per row")->default_val(100000);
    subs.push_back({hit, true});

    auto* ver = app.add_subcommand("verify", "Run the acceptance suite");
    add_common(ver, o);
    ver->add_option("--only", o.only, "Criteria to run, comma separated")->delimiter(',');
    subs.push_back({ver, false});

    try {
        std::vector<std::string> args(argv, argv + argc);
        args = expand_config(args);
        std::vector<const char*> cargs;
        for (const std::string& a : args)
            cargs.push_back(a.c_str());
        app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    const Sub* chosen = nullptr;
    for (const Sub& s : subs)
        if (s.app->parsed())
            chosen = &s;

    try {
        if (chosen->simulation && !o.seed)
            throw ConfigError("--seed is required for " + chosen->app->get_name());
        std::ofstream file;
        std::ostream* out = &std::cout;
        if (o.output != "-") {
            file.open(o.output);
            if (!file)
                throw ConfigError("cannot open " + o.output);
            out = &file;
        }
        const std::string config = resolved_config(chosen->app).dump(2) + "\n";
        if (o.output == "-") {
            std::cerr << config;
        } else {
            std::ofstream cfg(o.output + ".config.json");
            cfg << config;
        }
        const std::string name = chosen->app->get_name();
        bool ok = true;
        if (name == "simulate")
            rtp::cli::cmd_simulate(o, *out);
        else if (name == "invariant")
            rtp::cli::cmd_invariant(o, *out);
        else if (name == "converge")
            rtp::cli::cmd_converge(o, *out);
        else if (name == "mixing")
            rtp::cli::cmd_mixing(o, *out);
        else if (name == "hitting")
            rtp::cli::cmd_hitting(o, *out);
        else
            ok = rtp::cli::cmd_verify(o, *out);
        out->flush();
        return ok ? EXIT_SUCCESS : EXIT_FAILURE;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
