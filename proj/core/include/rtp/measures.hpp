#pragma once

#include <functional>
#include <string>
#include <vector>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "rtp/discretized.hpp"
#include "rtp/lattice.hpp"
#include "rtp/pdmp.hpp"
#include "rtp/random.hpp"
#include "rtp/velocity.hpp"

namespace rtp {

/// Constants of the finite-tumble invariant measure.
struct SpectralParams {
    double alpha;
    double beta;
    double ell;
    double kappa;
    double r;
    double r_tilde;
    double lambda_d;
    double lambda_a;
    double lambda_b;

    static SpectralParams from_rates(double alpha, double beta, double ell);
};

/// Coefficients of one sheet: atoms at 0 and ell, density a + bs sinh(k(x-ell/2)) + bc cosh(k(x-ell/2)).
struct SheetCoefficients {
    double d0 = 0.0;
    double dl = 0.0;
    double a = 0.0;
    double bs = 0.0;
    double bc = 0.0;
    friend bool operator==(const SheetCoefficients&, const SheetCoefficients&) = default;
};

class AtomicDensityMeasure {
  public:
    AtomicDensityMeasure(const TumbleKind& kind, double ell, double kappa, std::vector<SheetCoefficients> rows,
                         double normalization = 1.0);

    const TumbleKind& kind() const noexcept { return kind_; }
    double ell() const noexcept { return ell_; }
    double kappa() const noexcept { return kappa_; }
    /// Factor that was divided out of the raw (unnormalized) coefficients.
    double normalization() const noexcept { return normalization_; }
    const std::vector<SheetCoefficients>& rows() const noexcept { return rows_; }
    const SheetCoefficients& row(VelocityPair sigma) const { return rows_.at(pair_index(kind_, sigma)); }
    std::vector<SheetCoefficients>& mutable_rows() noexcept { return rows_; }

    double density(int pair, double x) const;
    double density_derivative(int pair, double x) const;
    /// int_0^x of the density.
    double cumulative_bulk(int pair, double x) const;
    double bulk_mass(int pair) const;
    double atom_mass() const;
    double total_mass() const;
    /// Minimum of the densities on a uniform grid of the given size.
    double min_density(int grid = 1000) const;

    AtomicDensityMeasure normalized() const;
    DiscretizedMeasure discretize(int bins) const;

    /// {kind, params, rows, kappa, ell, normalization}.
    std::string to_json() const;

  private:
    TumbleKind kind_;
    double ell_;
    double kappa_;
    std::vector<SheetCoefficients> rows_;
    double normalization_;
};

AtomicDensityMeasure citp_invariant(double omega, double ell);
/// Raw table coefficients (d0 of (1,0) equal to 1), not normalized.
AtomicDensityMeasure cftp_invariant_unnormalized(double alpha, double beta, double ell);
/// Probability measure; normalization() holds the raw total mass.
AtomicDensityMeasure cftp_invariant(double alpha, double beta, double ell);
AtomicDensityMeasure invariant_measure(const TumbleKind& kind, double ell);

/// Test function on [0,ell] x Sigma: a cubic spline per sheet plus values at the jam states.
struct SheetFunction {
    boost::math::interpolators::cardinal_cubic_b_spline<double> bulk;
    double at_zero;
    double at_ell;
};

class TestFunction {
  public:
    TestFunction(const TumbleKind& kind, double ell, std::vector<SheetFunction> sheets);
    static TestFunction constant(const TumbleKind& kind, double ell, double value);

    const std::vector<SheetFunction>& sheets() const noexcept { return sheets_; }
    /// Throws std::invalid_argument unless moving sheets are continuous up to the jam values.
    void check_domain() const;
    double sup_norm() const;

  private:
    TumbleKind kind_;
    double ell_;
    std::vector<SheetFunction> sheets_;
};

/// Random admissible test functions with `knots` uniform knots per sheet.
std::vector<TestFunction> random_test_functions(const TumbleKind& kind, double ell, int count, int knots,
                                                Stream& rng);

struct StationarityResidual {
    double max_abs;
    /// max |int Lf dpi| / (sup|f| * max pair exit rate)
    double max_relative;
};

StationarityResidual stationarity_residual(const AtomicDensityMeasure& measure, const TumbleKind& kind, double ell,
                                           const std::vector<TestFunction>& family);

/// Max over a grid of |-V F' + Q^t F| relative to the largest density term.
double ode_residual_bulk(const AtomicDensityMeasure& measure, double alpha, double beta, int grid = 1000);

/// Max of |Q^t D0 - V F(0)| and |Q^t Dl + V F(ell)|.
double boundary_residual(const AtomicDensityMeasure& measure, const TumbleKind& kind);

enum class Symmetry { rho1, rho2, rho3 };

/// rho1: (x,s1,s2) -> (ell-x,s2,s1); rho2: (ell-x,-s1,-s2); rho3: (x,-s2,-s1).
AtomicDensityMeasure symmetry_pushforward(const AtomicDensityMeasure& measure, Symmetry which);
ContState apply_symmetry(const ContState& s, double ell, Symmetry which);

std::vector<ContState> sample_invariant(const AtomicDensityMeasure& measure, std::size_t n, Stream& rng);

struct WeightedPoint {
    double x;
    VelocityPair sigma;
    double mass;
};

using PointMeasure = std::vector<WeightedPoint>;

/// Atoms kept exact, each bulk sheet binned to m atoms at the bin centroids.
PointMeasure to_points(const AtomicDensityMeasure& measure, int m = 1000);
/// Pushforward of pi_L under the embedding.
PointMeasure to_points(const StationaryVector& pi);
/// Atoms kept, bulk bins placed at their centres.
PointMeasure to_points(const DiscretizedMeasure& measure);

/// Distance between (x, s1, s2) embedded in R^3.
double embedded_distance(double x, VelocityPair s, double y, VelocityPair t);

/// Exact optimal transport cost between two point measures; throws if masses differ by more than 1e-9.
double w1_distance(const PointMeasure& mu, const PointMeasure& nu);

} // namespace rtp
