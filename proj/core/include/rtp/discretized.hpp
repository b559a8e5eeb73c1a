#pragma once

#include <iosfwd>
#include <vector>

#include "rtp/velocity.hpp"

namespace rtp {

/// Measure on [0,ell] x Sigma reduced to atoms at 0 and ell plus a uniform bulk histogram per pair.
class DiscretizedMeasure {
  public:
    DiscretizedMeasure(const TumbleKind& kind, double ell, int bins);

    const TumbleKind& kind() const noexcept { return kind_; }
    double ell() const noexcept { return ell_; }
    int bins() const noexcept { return bins_; }
    int pair_count() const noexcept { return kind_.pair_count(); }
    double bin_width() const noexcept { return ell_ / bins_; }

    double& atom_zero(int pair) { return atom0_.at(pair); }
    double& atom_ell(int pair) { return atoml_.at(pair); }
    double& bulk(int pair, int bin) { return bulk_.at(static_cast<std::size_t>(pair) * bins_ + bin); }
    double atom_zero(int pair) const { return atom0_.at(pair); }
    double atom_ell(int pair) const { return atoml_.at(pair); }
    double bulk(int pair, int bin) const { return bulk_.at(static_cast<std::size_t>(pair) * bins_ + bin); }

    double total_mass() const;
    void scale(double factor);
    /// Flattened (atoms at 0, atoms at ell, bulk) vector.
    std::vector<double> flatten() const;
    bool same_layout(const DiscretizedMeasure& other) const noexcept;

    /// Columns: bin_lo,bin_hi,atom,s1,s2,mass; atom is "0", "ell" or "" for bulk rows.
    void write_csv(std::ostream& os) const;

  private:
    TumbleKind kind_;
    double ell_;
    int bins_;
    std::vector<double> atom0_;
    std::vector<double> atoml_;
    std::vector<double> bulk_;
};

/// Half L1 distance; throws on layout mismatch.
double tv_distance(const DiscretizedMeasure& mu, const DiscretizedMeasure& nu);

} // namespace rtp
