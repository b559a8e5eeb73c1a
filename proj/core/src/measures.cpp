#include "rtp/measures.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <json.hpp>

#include "rtp/transport.hpp"

namespace rtp {

namespace {

using Gauss20 = boost::math::quadrature::gauss<double, 20>;
using Gauss10 = boost::math::quadrature::gauss<double, 10>;

} // namespace

SpectralParams SpectralParams::from_rates(double alpha, double beta, double ell)
{
    if (!(alpha > 0.0) || !(beta > 0.0) || !(ell > 0.0))
        throw std::invalid_argument("alpha, beta and ell must be > 0");
    SpectralParams s{};
    s.alpha = alpha;
    s.beta = beta;
    s.ell = ell;
    s.kappa = std::sqrt((alpha + beta) * (2.0 * alpha + beta) / 2.0);
    s.r = alpha / beta;
    s.r_tilde = s.kappa / beta;
    const double th = std::tanh(s.kappa * ell / 2.0);
    const double r = s.r;
    const double rt = s.r_tilde;
    s.lambda_d = (1.0 / r) * (1.0 - rt / (2.0 * rt + (2.0 * r + 1.0) * th));
    s.lambda_a = s.kappa / (4.0 * rt) * (1.0 - 1.0 / (2.0 * r + 2.0 + 2.0 * rt * th));
    s.lambda_b = s.kappa / (4.0 * (r + 1.0) * std::cosh(s.kappa * ell / 2.0) * (2.0 * rt + (2.0 * r + 1.0) * th));
    return s;
}

AtomicDensityMeasure::AtomicDensityMeasure(const TumbleKind& kind, double ell, double kappa,
                                           std::vector<SheetCoefficients> rows, double normalization)
    : kind_(kind), ell_(ell), kappa_(kappa), rows_(std::move(rows)), normalization_(normalization)
{
    if (!(ell > 0.0))
        throw std::invalid_argument("ell must be > 0");
    if (!(kappa >= 0.0))
        throw std::invalid_argument("kappa must be >= 0");
    if (static_cast<int>(rows_.size()) != kind.pair_count())
        throw std::invalid_argument("one coefficient row per velocity pair required");
}

double AtomicDensityMeasure::density(int p, double x) const
{
    const SheetCoefficients& c = rows_.at(p);
    const double u = kappa_ * (x - 0.5 * ell_);
    return c.a + c.bs * std::sinh(u) + c.bc * std::cosh(u);
}

double AtomicDensityMeasure::density_derivative(int p, double x) const
{
    const SheetCoefficients& c = rows_.at(p);
    const double u = kappa_ * (x - 0.5 * ell_);
    return kappa_ * (c.bs * std::cosh(u) + c.bc * std::sinh(u));
}

double AtomicDensityMeasure::cumulative_bulk(int p, double x) const
{
    const SheetCoefficients& c = rows_.at(p);
    if (kappa_ == 0.0)
        return (c.a + c.bc) * x;
    const double h = 0.5 * kappa_ * ell_;
    const double u = kappa_ * (x - 0.5 * ell_);
    return c.a * x + c.bs / kappa_ * (std::cosh(u) - std::cosh(h)) + c.bc / kappa_ * (std::sinh(u) + std::sinh(h));
}

double AtomicDensityMeasure::bulk_mass(int p) const
{
    const SheetCoefficients& c = rows_.at(p);
    if (kappa_ == 0.0)
        return (c.a + c.bc) * ell_;
    return c.a * ell_ + c.bc * 2.0 / kappa_ * std::sinh(0.5 * kappa_ * ell_);
}

double AtomicDensityMeasure::atom_mass() const
{
    double s = 0.0;
    for (const auto& c : rows_)
        s += c.d0 + c.dl;
    return s;
}

double AtomicDensityMeasure::total_mass() const
{
    double s = atom_mass();
    for (int p = 0; p < static_cast<int>(rows_.size()); ++p)
        s += bulk_mass(p);
    return s;
}

double AtomicDensityMeasure::min_density(int grid) const
{
    double m = std::numeric_limits<double>::infinity();
    for (int p = 0; p < static_cast<int>(rows_.size()); ++p)
        for (int i = 0; i <= grid; ++i)
            m = std::min(m, density(p, ell_ * i / grid));
    return m;
}

AtomicDensityMeasure AtomicDensityMeasure::normalized() const
{
    const double z = total_mass();
    if (!(z > 0.0))
        throw std::invalid_argument("cannot normalize a measure without mass");
    std::vector<SheetCoefficients> rows = rows_;
    for (auto& c : rows) {
        c.d0 /= z;
        c.dl /= z;
        c.a /= z;
        c.bs /= z;
        c.bc /= z;
    }
    return AtomicDensityMeasure(kind_, ell_, kappa_, std::move(rows), normalization_ * z);
}

DiscretizedMeasure AtomicDensityMeasure::discretize(int bins) const
{
    DiscretizedMeasure d(kind_, ell_, bins);
    for (int p = 0; p < static_cast<int>(rows_.size()); ++p) {
        d.atom_zero(p) = rows_[p].d0;
        d.atom_ell(p) = rows_[p].dl;
        double prev = 0.0;
        for (int b = 0; b < bins; ++b) {
            const double next = cumulative_bulk(p, b + 1 == bins ? ell_ : ell_ * (b + 1) / bins);
            d.bulk(p, b) = next - prev;
            prev = next;
        }
    }
    return d;
}

std::string AtomicDensityMeasure::to_json() const
{
    nlohmann::ordered_json j;
    j["kind"] = kind_.is_instantaneous() ? "instantaneous" : "finite";
    if (kind_.is_instantaneous())
        j["params"] = {{"omega", kind_.omega()}, {"ell", ell_}};
    else
        j["params"] = {{"alpha", kind_.alpha()}, {"beta", kind_.beta()}, {"ell", ell_}};
    auto rows = nlohmann::ordered_json::array();
    for (int p = 0; p < static_cast<int>(rows_.size()); ++p) {
        const VelocityPair s = pair_at(kind_, p);
        const auto& c = rows_[p];
        rows.push_back({{"s1", s.s1}, {"s2", s.s2}, {"d0", c.d0}, {"dl", c.dl}, {"a", c.a}, {"bs", c.bs},
                        {"bc", c.bc}});
    }
    j["rows"] = rows;
    j["kappa"] = kappa_;
    j["ell"] = ell_;
    j["normalization"] = normalization_;
    return j.dump(2);
}

AtomicDensityMeasure citp_invariant(double omega, double ell)
{
    const TumbleKind kind = TumbleKind::instantaneous(omega);
    if (!(ell > 0.0))
        throw std::invalid_argument("ell must be > 0");
    const double c = 2.0 + omega * ell;
    const double atom = 1.0 / (4.0 * c);
    const double a = omega / (4.0 * c);
    std::vector<SheetCoefficients> rows(4);
    rows[pair_index(kind, {1, 1})] = {atom, atom, a, 0.0, 0.0};
    rows[pair_index(kind, {1, -1})] = {1.0 / (2.0 * c), 0.0, a, 0.0, 0.0};
    rows[pair_index(kind, {-1, 1})] = {0.0, 1.0 / (2.0 * c), a, 0.0, 0.0};
    rows[pair_index(kind, {-1, -1})] = {atom, atom, a, 0.0, 0.0};
    return AtomicDensityMeasure(kind, ell, 0.0, std::move(rows));
}

AtomicDensityMeasure cftp_invariant_unnormalized(double alpha, double beta, double ell)
{
    const TumbleKind kind = TumbleKind::finite(alpha, beta);
    const SpectralParams sp = SpectralParams::from_rates(alpha, beta, ell);
    const double r = sp.r;
    const double rt = sp.r_tilde;
    const double la = sp.lambda_a;
    const double lb = sp.lambda_b;
    const double ld = sp.lambda_d;
    const double diag_atom = 1.0 / (4.0 * r);
    const double diag_bc = (2.0 * r + 1.0) / r * lb;
    const double mixed_a = 2.0 * r * la;
    const double mixed_bc = (4.0 * r + 2.0) * lb;
    const double mixed_bs = 2.0 * rt * lb;
    const double opp_bc = -(2.0 * r + 1.0) * lb;
    std::vector<SheetCoefficients> rows(9);
    auto set = [&](VelocityPair s, SheetCoefficients c) { rows[pair_index(kind, s)] = c; };
    set({1, 1}, {diag_atom, diag_atom, la, 0.0, diag_bc});
    set({1, 0}, {1.0, 0.0, mixed_a, mixed_bs, mixed_bc});
    set({1, -1}, {ld, 0.0, la, -mixed_bs, opp_bc});
    set({0, 1}, {0.0, 1.0, mixed_a, -mixed_bs, mixed_bc});
    set({0, 0}, {r, r, 4.0 * r * r * la, 0.0, 4.0 * r * (2.0 * r + 1.0) * lb});
    set({0, -1}, {1.0, 0.0, mixed_a, mixed_bs, mixed_bc});
    set({-1, 1}, {0.0, ld, la, mixed_bs, opp_bc});
    set({-1, 0}, {0.0, 1.0, mixed_a, -mixed_bs, mixed_bc});
    set({-1, -1}, {diag_atom, diag_atom, la, 0.0, diag_bc});
    return AtomicDensityMeasure(kind, ell, sp.kappa, std::move(rows));
}

AtomicDensityMeasure cftp_invariant(double alpha, double beta, double ell)
{
    return cftp_invariant_unnormalized(alpha, beta, ell).normalized();
}

AtomicDensityMeasure invariant_measure(const TumbleKind& kind, double ell)
{
    if (kind.is_instantaneous())
        return citp_invariant(kind.omega(), ell);
    return cftp_invariant(kind.alpha(), kind.beta(), ell);
}

TestFunction::TestFunction(const TumbleKind& kind, double ell, std::vector<SheetFunction> sheets)
    : kind_(kind), ell_(ell), sheets_(std::move(sheets))
{
    if (static_cast<int>(sheets_.size()) != kind.pair_count())
        throw std::invalid_argument("one sheet per velocity pair required");
}

TestFunction TestFunction::constant(const TumbleKind& kind, double ell, double value)
{
    std::vector<SheetFunction> sheets;
    const double knots[4] = {value, value, value, value};
    for (int p = 0; p < kind.pair_count(); ++p)
        sheets.push_back({boost::math::interpolators::cardinal_cubic_b_spline<double>(knots, 4, 0.0, ell / 3.0,
                                                                                       0.0, 0.0),
                          value, value});
    return TestFunction(kind, ell, std::move(sheets));
}

void TestFunction::check_domain() const
{
    const double tol = 1e-12 * std::max(1.0, sup_norm());
    for (int p = 0; p < kind_.pair_count(); ++p) {
        if (pair_at(kind_, p).relative_speed() == 0)
            continue;
        const SheetFunction& s = sheets_[p];
        if (std::abs(s.bulk(0.0) - s.at_zero) > tol || std::abs(s.bulk(ell_) - s.at_ell) > tol)
            throw std::invalid_argument("test function is discontinuous at a jam state of a moving sheet");
    }
}

double TestFunction::sup_norm() const
{
    double m = 0.0;
    for (const auto& s : sheets_) {
        m = std::max({m, std::abs(s.at_zero), std::abs(s.at_ell)});
        for (int i = 0; i <= 1000; ++i)
            m = std::max(m, std::abs(s.bulk(ell_ * i / 1000.0)));
    }
    return m;
}

std::vector<TestFunction> random_test_functions(const TumbleKind& kind, double ell, int count, int knots,
                                                Stream& rng)
{
    if (knots < 4)
        throw std::invalid_argument("at least 4 knots required");
    std::vector<TestFunction> out;
    std::vector<double> values(knots);
    for (int c = 0; c < count; ++c) {
        std::vector<SheetFunction> sheets;
        for (int p = 0; p < kind.pair_count(); ++p) {
            for (auto& v : values)
                v = 2.0 * rng.uniform() - 1.0;
            boost::math::interpolators::cardinal_cubic_b_spline<double> spline(values.data(), values.size(), 0.0,
                                                                               ell / (knots - 1));
            double z = spline(0.0);
            double l = spline(ell);
            if (pair_at(kind, p).relative_speed() == 0) {
                z = 2.0 * rng.uniform() - 1.0;
                l = 2.0 * rng.uniform() - 1.0;
            }
            sheets.push_back({std::move(spline), z, l});
        }
        out.emplace_back(kind, ell, std::move(sheets));
    }
    return out;
}

StationarityResidual stationarity_residual(const AtomicDensityMeasure& measure, const TumbleKind& kind, double ell,
                                           const std::vector<TestFunction>& family)
{
    if (!(measure.kind() == kind) || measure.ell() != ell)
        throw std::invalid_argument("measure does not match the process parameters");
    const Eigen::MatrixXd q = pair_generator(kind);
    const int m = kind.pair_count();
    const double rate = kind.max_pair_exit_rate();
    constexpr int kPieces = 500;
    StationarityResidual out{0.0, 0.0};
    for (const TestFunction& f : family) {
        f.check_domain();
        const auto& sh = f.sheets();
        double total = 0.0;
        for (int p = 0; p < m; ++p) {
            const int v = pair_at(kind, p).relative_speed();
            auto lf = [&](double x) {
                const double fp = sh[p].bulk(x);
                double s = v * sh[p].bulk.prime(x);
                for (int b = 0; b < m; ++b)
                    if (b != p && q(p, b) != 0.0)
                        s += q(p, b) * (sh[b].bulk(x) - fp);
                return s * measure.density(p, x);
            };
            for (int i = 0; i < kPieces; ++i)
                total += Gauss20::integrate(lf, ell * i / kPieces, ell * (i + 1) / kPieces);
            const SheetCoefficients& c = measure.rows()[p];
            double at0 = v > 0 ? v * sh[p].bulk.prime(0.0) : 0.0;
            double atl = v < 0 ? v * sh[p].bulk.prime(ell) : 0.0;
            for (int b = 0; b < m; ++b) {
                if (b == p || q(p, b) == 0.0)
                    continue;
                at0 += q(p, b) * (sh[b].at_zero - sh[p].at_zero);
                atl += q(p, b) * (sh[b].at_ell - sh[p].at_ell);
            }
            total += c.d0 * at0 + c.dl * atl;
        }
        const double norm = f.sup_norm();
        out.max_abs = std::max(out.max_abs, std::abs(total));
        if (norm > 0.0)
            out.max_relative = std::max(out.max_relative, std::abs(total) / (norm * rate));
    }
    return out;
}

double ode_residual_bulk(const AtomicDensityMeasure& measure, double alpha, double beta, int grid)
{
    const TumbleKind kind = TumbleKind::finite(alpha, beta);
    if (measure.kind().model() != TumbleModel::finite)
        throw std::invalid_argument("bulk ODE check requires a finite-tumble measure");
    const Eigen::MatrixXd qt = pair_generator(kind).transpose();
    const int m = kind.pair_count();
    double worst = 0.0;
    double scale = 0.0;
    Eigen::VectorXd f(m);
    Eigen::VectorXd vfp(m);
    for (int i = 0; i <= grid; ++i) {
        const double x = measure.ell() * i / grid;
        for (int p = 0; p < m; ++p) {
            f(p) = measure.density(p, x);
            vfp(p) = pair_at(kind, p).relative_speed() * measure.density_derivative(p, x);
        }
        const Eigen::VectorXd qf = qt * f;
        worst = std::max(worst, (qf - vfp).cwiseAbs().maxCoeff());
        scale = std::max({scale, vfp.cwiseAbs().maxCoeff(), qf.cwiseAbs().maxCoeff()});
    }
    return scale > 0.0 ? worst / scale : 0.0;
}

double boundary_residual(const AtomicDensityMeasure& measure, const TumbleKind& kind)
{
    const Eigen::MatrixXd qt = pair_generator(kind).transpose();
    const int m = kind.pair_count();
    Eigen::VectorXd d0(m), dl(m), v0(m), vl(m);
    for (int p = 0; p < m; ++p) {
        const int v = pair_at(kind, p).relative_speed();
        d0(p) = measure.rows()[p].d0;
        dl(p) = measure.rows()[p].dl;
        v0(p) = v * measure.density(p, 0.0);
        vl(p) = v * measure.density(p, measure.ell());
    }
    return std::max((qt * d0 - v0).cwiseAbs().maxCoeff(), (qt * dl + vl).cwiseAbs().maxCoeff());
}

namespace {

VelocityPair map_pair(VelocityPair s, Symmetry which)
{
    switch (which) {
    case Symmetry::rho1:
        return {s.s2, s.s1};
    case Symmetry::rho2:
        return {-s.s1, -s.s2};
    case Symmetry::rho3:
        return {-s.s2, -s.s1};
    }
    return s;
}

bool reflects(Symmetry which) { return which != Symmetry::rho3; }

} // namespace

ContState apply_symmetry(const ContState& s, double ell, Symmetry which)
{
    return {reflects(which) ? ell - s.x : s.x, map_pair(s.sigma, which)};
}

AtomicDensityMeasure symmetry_pushforward(const AtomicDensityMeasure& measure, Symmetry which)
{
    const TumbleKind& kind = measure.kind();
    std::vector<SheetCoefficients> rows(measure.rows().size());
    for (int p = 0; p < kind.pair_count(); ++p) {
        SheetCoefficients c = measure.rows()[p];
        if (reflects(which)) {
            std::swap(c.d0, c.dl);
            c.bs = -c.bs;
        }
        rows[pair_index(kind, map_pair(pair_at(kind, p), which))] = c;
    }
    return AtomicDensityMeasure(kind, measure.ell(), measure.kappa(), std::move(rows), measure.normalization());
}

std::vector<ContState> sample_invariant(const AtomicDensityMeasure& measure, std::size_t n, Stream& rng)
{
    if (std::abs(measure.total_mass() - 1.0) > 1e-12)
        throw std::invalid_argument("sample_invariant requires a normalized measure");
    const TumbleKind& kind = measure.kind();
    const int m = kind.pair_count();
    const double ell = measure.ell();
    // Components: per pair (atom 0, bulk, atom ell).
    std::vector<double> cum;
    double acc = 0.0;
    for (int p = 0; p < m; ++p) {
        for (double w : {measure.rows()[p].d0, measure.bulk_mass(p), measure.rows()[p].dl}) {
            acc += std::max(0.0, w);
            cum.push_back(acc);
        }
    }
    std::vector<ContState> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform() * acc;
        int c = static_cast<int>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
        c = std::min(c, static_cast<int>(cum.size()) - 1);
        while (c > 0 && cum[c] == cum[c - 1])
            --c;
        const int p = c / 3;
        const VelocityPair s = pair_at(kind, p);
        if (c % 3 == 0) {
            out.push_back({0.0, s});
        } else if (c % 3 == 2) {
            out.push_back({ell, s});
        } else {
            const double target = rng.uniform() * measure.bulk_mass(p);
            double x;
            if (measure.kappa() == 0.0) {
                x = target / measure.bulk_mass(p) * ell;
            } else {
                auto g = [&](double y) { return measure.cumulative_bulk(p, y) - target; };
                std::uintmax_t iters = 200;
                auto tol = [ell](double a, double b) { return std::abs(b - a) <= 1e-13 * ell; };
                const auto r = boost::math::tools::toms748_solve(g, 0.0, ell, g(0.0), g(ell), tol, iters);
                x = 0.5 * (r.first + r.second);
            }
            out.push_back({std::clamp(x, 0.0, ell), s});
        }
    }
    return out;
}

PointMeasure to_points(const AtomicDensityMeasure& measure, int m)
{
    if (m < 1)
        throw std::invalid_argument("m must be >= 1");
    const TumbleKind& kind = measure.kind();
    const double ell = measure.ell();
    PointMeasure out;
    for (int p = 0; p < kind.pair_count(); ++p) {
        const VelocityPair s = pair_at(kind, p);
        const auto& c = measure.rows()[p];
        if (c.d0 > 0.0)
            out.push_back({0.0, s, c.d0});
        double prev = 0.0;
        for (int b = 0; b < m; ++b) {
            const double lo = ell * b / m;
            const double hi = b + 1 == m ? ell : ell * (b + 1) / m;
            const double next = measure.cumulative_bulk(p, hi);
            const double mass = next - prev;
            prev = next;
            if (!(mass > 0.0))
                continue;
            const double first = Gauss10::integrate([&](double x) { return x * measure.density(p, x); }, lo, hi);
            const double zeroth = Gauss10::integrate([&](double x) { return measure.density(p, x); }, lo, hi);
            const double centroid = zeroth > 0.0 ? std::clamp(first / zeroth, lo, hi) : 0.5 * (lo + hi);
            out.push_back({centroid, s, mass});
        }
        if (c.dl > 0.0)
            out.push_back({ell, s, c.dl});
    }
    return out;
}

PointMeasure to_points(const StationaryVector& pi)
{
    const LatticeParams& lp = pi.params();
    PointMeasure out;
    for (int i = 0; i < lp.state_count(); ++i) {
        const double w = pi.values()[i];
        if (!(w > 0.0))
            continue;
        const LatticeState s = state_at_index(lp, i);
        out.push_back({embed_position(s.y, lp.L, lp.ell), s.sigma, w});
    }
    return out;
}

PointMeasure to_points(const DiscretizedMeasure& measure)
{
    PointMeasure out;
    for (int p = 0; p < measure.pair_count(); ++p) {
        const VelocityPair s = pair_at(measure.kind(), p);
        if (measure.atom_zero(p) > 0.0)
            out.push_back({0.0, s, measure.atom_zero(p)});
        for (int b = 0; b < measure.bins(); ++b)
            if (measure.bulk(p, b) > 0.0)
                out.push_back({(b + 0.5) * measure.bin_width(), s, measure.bulk(p, b)});
        if (measure.atom_ell(p) > 0.0)
            out.push_back({measure.ell(), s, measure.atom_ell(p)});
    }
    return out;
}

double embedded_distance(double x, VelocityPair s, double y, VelocityPair t)
{
    const double d1 = s.s1 - t.s1;
    const double d2 = s.s2 - t.s2;
    return std::sqrt((x - y) * (x - y) + d1 * d1 + d2 * d2);
}

double w1_distance(const PointMeasure& mu, const PointMeasure& nu)
{
    PointMeasure a;
    PointMeasure b;
    double ma = 0.0;
    double mb = 0.0;
    for (const auto& p : mu) {
        if (p.mass < 0.0)
            throw std::invalid_argument("negative mass");
        if (p.mass > 0.0) {
            a.push_back(p);
            ma += p.mass;
        }
    }
    for (const auto& p : nu) {
        if (p.mass < 0.0)
            throw std::invalid_argument("negative mass");
        if (p.mass > 0.0) {
            b.push_back(p);
            mb += p.mass;
        }
    }
    if (std::abs(ma - mb) > 1e-9)
        throw std::invalid_argument("w1_distance: mass mismatch");
    if (a.empty())
        return 0.0;
    std::vector<double> supply(a.size());
    std::vector<double> demand(b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        supply[i] = a[i].mass;
    for (std::size_t j = 0; j < b.size(); ++j)
        demand[j] = b[j].mass;
    const std::function<double(int, int)> cost = [&](int i, int j) {
        return embedded_distance(a[i].x, a[i].sigma, b[j].x, b[j].sigma);
    };
    return solve_transport(supply, demand, cost).cost;
}

} // namespace rtp
