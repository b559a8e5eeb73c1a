#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace rtp::cli {

/// Raised for invalid configurations; mapped to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string kind = "citp";
    std::vector<double> omega{1.0};
    std::vector<double> alpha{1.0};
    std::vector<double> beta{1.0};
    std::vector<double> ell{1.0};
    int L = 0;
    std::vector<int> Ls;
    std::optional<double> gamma;
    double horizon = 100.0;
    double T = 1.0;
    int replicas = 1000;
    std::optional<std::uint64_t> seed;
    double epsilon = 0.1;
    int bins = 50;
    int w1_bins = 1000;
    bool w1 = true;
    std::optional<double> x0;
    std::optional<int> y0;
    int s1 = 1;
    int s2 = -1;
    std::optional<double> compare_horizon;
    int pilot_replicas = 64;
    int worst_pairs = 3;
    int tv_samples = 2000;
    double cap_factor = 200.0;
    std::vector<int> only;
    int workers = 1;
    std::string output = "-";
};

void cmd_simulate(const Options& o, std::ostream& out);
void cmd_invariant(const Options& o, std::ostream& out);
void cmd_converge(const Options& o, std::ostream& out);
void cmd_mixing(const Options& o, std::ostream& out);
void cmd_hitting(const Options& o, std::ostream& out);
/// Returns true when every acceptance criterion passed.
bool cmd_verify(const Options& o, std::ostream& out);

} // namespace rtp::cli
