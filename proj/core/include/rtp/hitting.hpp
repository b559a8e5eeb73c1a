#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "rtp/pdmp.hpp"
#include "rtp/random.hpp"
#include "rtp/velocity.hpp"

namespace rtp {

/// E[time to reach x = 0 with sigma = (1,-1)] for the instantaneous-tumble process.
double mean_hitting_time_citp(double x, VelocityPair sigma, double omega, double ell);

struct HittingBound {
    double value;
    double x;
    VelocityPair sigma;
};

/// Exact maximum of mean_hitting_time_citp over [0, ell] x Sigma.
HittingBound hitting_bound_citp(double omega, double ell);

/// E[first time two independent finite-tumble velocities started at s0, s0_tilde agree].
double mean_velocity_coupling_time_cftp(int s0, int s0_tilde, double alpha, double beta);

/// Distribution of sigma(tau_0) over (1,1), (0,0), (-1,-1).
using DiagonalLaw = std::array<double, 3>;

struct DiagonalReturnStatistics {
    /// E_sigma[tau_0] for every pair, alphabet order, from the displayed closed forms.
    std::vector<double> mean_return;
    /// Same quantity from a first-step linear solve.
    std::vector<double> mean_return_solved;
    /// P_sigma(sigma(tau_0) = .) per starting pair, from a first-step linear solve.
    std::vector<DiagonalLaw> hit_law;
    /// The values as printed: (2a/(2a+b)) for (0,0) and b/(2a+b) for each of (1,1), (-1,-1).
    DiagonalLaw displayed_hit_law;
    /// (a+b)^2 / (2a^2 b + a b^2).
    double per_step_mean;
    /// sum_s P(sigma(tau_0)=(s,s)) E_(s,s)[tau_0] under the solved law, per starting pair.
    std::vector<double> per_step_mean_solved;
};

DiagonalReturnStatistics diagonal_return_statistics(double alpha, double beta);

/// Smallest positive lambda^2 at which the displayed denominator vanishes.
double excursion_mgf_pole(double alpha, double beta);
/// phi(lambda); throws std::domain_error at or beyond the first pole (within 1e-9).
double excursion_mgf(double lambda, double alpha, double beta);
/// (E D, E D^2, E D^3, E D^4) of one diagonal excursion.
std::array<double, 4> excursion_moments(double alpha, double beta);

struct ExcursionSample {
    std::vector<double> d;               ///< successive excursion integrals
    std::vector<double> duration;        ///< successive tau_i - tau_{i-1}
    std::array<std::size_t, 3> hits{};   ///< counts of (1,1), (0,0), (-1,-1) at the returns
};

/// Successive returns of the pair velocity to the diagonal, starting on the diagonal.
ExcursionSample sample_diagonal_excursions(double alpha, double beta, VelocityPair start, std::size_t n,
                                           std::uint64_t seed);

struct ZeroExcursionCheck {
    std::size_t n;
    double ks;
    double ks_critical; ///< 1.36 / sqrt(n)
    double second_moment;
    double second_moment_stderr;
    double fraction_positive;
    double lag1_autocorrelation;
};

/// Single-particle integrals between consecutive visits to velocity 0, against Laplace(1/alpha).
ZeroExcursionCheck zero_excursion_law_check(double alpha, std::size_t n, std::uint64_t seed, double beta = 1.0);

double lag1_autocorrelation(const std::vector<double>& v);

struct JamAtZero {
    ContState start;
};
struct VelocityAgreement {
    int s0;
    int s0_tilde;
};
struct DiagonalReturn {
    VelocityPair start;
};
using HittingQuery = std::variant<JamAtZero, VelocityAgreement, DiagonalReturn>;

struct MonteCarloEstimate {
    double mean;
    double stderr_;
    std::size_t replicas;
};

MonteCarloEstimate monte_carlo_hitting(const TumbleKind& kind, double ell, const HittingQuery& query,
                                       std::size_t replicas, std::uint64_t seed, int workers = 1);

struct OracleRow {
    std::string query;
    double closed_form;
    double mc_mean;
    double mc_stderr;
    double z;
};

struct OracleTableConfig {
    std::vector<std::pair<double, double>> citp_points{{1.0, 1.0}, {0.5, 2.0}, {2.0, 0.5}}; ///< (omega, ell)
    std::vector<std::pair<double, double>> cftp_points{{1.0, 1.0}, {2.0, 0.5}, {0.5, 2.0}}; ///< (alpha, beta)
    std::size_t replicas = 100000;
    std::uint64_t seed = 1;
    int workers = 1;
};

/// Closed-form hitting, velocity-coupling and diagonal-return means against Monte Carlo.
std::vector<OracleRow> hitting_oracle_table(const OracleTableConfig& cfg);

} // namespace rtp
