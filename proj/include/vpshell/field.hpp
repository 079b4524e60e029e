#ifndef VPSHELL_FIELD_HPP
#define VPSHELL_FIELD_HPP

#include <cstddef>
#include <vector>

#include "vpshell/core.hpp"

namespace vpshell {

// Discrete realization of m(t,r) = 4 pi \int_0^r s^2 rho ds: a
// non-decreasing step function with jumps at the (sorted) particle radii.
// Built once per accepted step; immutable afterwards, safe for concurrent
// queries.
class MassProfile {
  public:
    // Stable sort by radius (ties broken by particle index), then a serial
    // prefix sum of weights in that order.
    static MassProfile build(const Ensemble &e);

    // m(r): total weight of particles with radius strictly below r.
    double enclosed_mass(double r) const;

    // Enclosed mass seen by particle i: weights of all particles with
    // R_j < R_i plus half the weight of other particles with R_j == R_i.
    // The particle's own weight is never included (no self-force).
    double enclosed_mass_at_particle(std::size_t i) const;

    // m(r)/r^2 for r > 0.
    double field_magnitude(double r) const;

    // (1/8pi) \int |E|^2 dx in closed form over the piecewise-constant m:
    // 1/2 sum_j m_j^2 (1/r_j - 1/r_{j+1}) + 1/2 M^2 / r_N.
    double field_energy() const;

    // Exact sup over r > 0 of m(r)/r^2; attained at the right limit of one
    // of the jump radii.
    double sup_field() const;

    double total() const { return total_; }
    std::size_t size() const { return radii_.size(); }
    double min_radius() const { return radii_.empty() ? 0.0 : radii_.front(); }
    double max_radius() const { return radii_.empty() ? 0.0 : radii_.back(); }

    const std::vector<double> &sorted_radii() const { return radii_; }
    // cumulative_[k] = sum of weights of the k+1 innermost particles.
    const std::vector<double> &cumulative_masses() const { return cumulative_; }

  private:
    std::vector<double> radii_;      // ascending
    std::vector<double> cumulative_; // prefix sums in radius order
    std::vector<double> at_particle_; // enclosed mass per original index
    double total_ = 0.0;
};

} // namespace vpshell

#endif
