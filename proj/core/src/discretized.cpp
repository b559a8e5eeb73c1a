#include "rtp/discretized.hpp"

#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace rtp {

DiscretizedMeasure::DiscretizedMeasure(const TumbleKind& kind, double ell, int bins)
    : kind_(kind), ell_(ell), bins_(bins), atom0_(kind.pair_count(), 0.0), atoml_(kind.pair_count(), 0.0),
      bulk_(static_cast<std::size_t>(kind.pair_count()) * (bins > 0 ? bins : 0), 0.0)
{
    if (bins < 1)
        throw std::invalid_argument("bins must be >= 1");
    if (!(ell > 0.0))
        throw std::invalid_argument("ell must be > 0");
}

double DiscretizedMeasure::total_mass() const
{
    const auto v = flatten();
    return std::accumulate(v.begin(), v.end(), 0.0);
}

void DiscretizedMeasure::scale(double factor)
{
    for (auto* v : {&atom0_, &atoml_, &bulk_})
        for (auto& x : *v)
            x *= factor;
}

std::vector<double> DiscretizedMeasure::flatten() const
{
    std::vector<double> out;
    out.reserve(atom0_.size() + atoml_.size() + bulk_.size());
    out.insert(out.end(), atom0_.begin(), atom0_.end());
    out.insert(out.end(), atoml_.begin(), atoml_.end());
    out.insert(out.end(), bulk_.begin(), bulk_.end());
    return out;
}

bool DiscretizedMeasure::same_layout(const DiscretizedMeasure& other) const noexcept
{
    return kind_.model() == other.kind_.model() && bins_ == other.bins_ && ell_ == other.ell_;
}

void DiscretizedMeasure::write_csv(std::ostream& os) const
{
    os << "bin_lo,bin_hi,atom,s1,s2,mass\n";
    os.precision(17);
    for (int p = 0; p < pair_count(); ++p) {
        const VelocityPair s = pair_at(kind_, p);
        os << 0.0 << ',' << 0.0 << ",0," << s.s1 << ',' << s.s2 << ',' << atom_zero(p) << '\n';
        for (int b = 0; b < bins_; ++b)
            os << b * bin_width() << ',' << (b + 1) * bin_width() << ",," << s.s1 << ',' << s.s2 << ','
               << bulk(p, b) << '\n';
        os << ell_ << ',' << ell_ << ",ell," << s.s1 << ',' << s.s2 << ',' << atom_ell(p) << '\n';
    }
}

double tv_distance(const DiscretizedMeasure& mu, const DiscretizedMeasure& nu)
{
    if (!mu.same_layout(nu))
        throw std::invalid_argument("tv_distance: discretizations differ");
    const auto a = mu.flatten();
    const auto b = nu.flatten();
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += std::abs(a[i] - b[i]);
    return 0.5 * s;
}

} // namespace rtp
