#include "vpshell/field.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace vpshell {

MassProfile MassProfile::build(const Ensemble &e)
{
    const std::size_t n = e.size();
    MassProfile mp;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return e.particles[a].R < e.particles[b].R;
    });

    mp.radii_.resize(n);
    mp.cumulative_.resize(n);
    mp.at_particle_.resize(n);

    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const auto &p = e.particles[order[k]];
        mp.radii_[k] = p.R;
        acc += p.weight;
        mp.cumulative_[k] = acc;
    }
    mp.total_ = acc;

    // Enclosed mass per particle with the half-weight tie convention.
    // Walk runs of equal radius in sorted order.
    std::size_t k = 0;
    while (k < n) {
        std::size_t j = k;
        while (j + 1 < n && mp.radii_[j + 1] == mp.radii_[k])
            ++j;
        const double below = (k == 0) ? 0.0 : mp.cumulative_[k - 1];
        const double tied = mp.cumulative_[j] - below;
        for (std::size_t t = k; t <= j; ++t) {
            const double own = e.particles[order[t]].weight;
            mp.at_particle_[order[t]] = below + 0.5 * (tied - own);
        }
        k = j + 1;
    }
    return mp;
}

double MassProfile::enclosed_mass(double r) const
{
    // first radius >= r; everything strictly below contributes
    const auto it = std::lower_bound(radii_.begin(), radii_.end(), r);
    const std::size_t k = static_cast<std::size_t>(it - radii_.begin());
    return k == 0 ? 0.0 : cumulative_[k - 1];
}

double MassProfile::enclosed_mass_at_particle(std::size_t i) const
{
    return at_particle_.at(i);
}

double MassProfile::field_magnitude(double r) const
{
    if (r <= 0.0)
        throw std::domain_error("field_magnitude: r must be positive");
    return enclosed_mass(r) / (r * r);
}

double MassProfile::field_energy() const
{
    const std::size_t n = radii_.size();
    if (n == 0)
        return 0.0;
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < n; ++j)
        acc += 0.5 * cumulative_[j] * cumulative_[j] * (1.0 / radii_[j] - 1.0 / radii_[j + 1]);
    acc += 0.5 * total_ * total_ / radii_.back();
    return acc;
}

double MassProfile::sup_field() const
{
    // m is right-continuous; the sup of m(r)/r^2 is attained just outside
    // one of the jump radii, where m equals the cumulative mass there.
    double best = 0.0;
    for (std::size_t j = 0; j < radii_.size(); ++j) {
        const double v = cumulative_[j] / (radii_[j] * radii_[j]);
        if (v > best)
            best = v;
    }
    return best;
}

} // namespace vpshell
