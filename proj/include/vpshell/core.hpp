#ifndef VPSHELL_CORE_HPP
#define VPSHELL_CORE_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

// Dimensionless units throughout: particle mass, charge, and the speed of
// light are all 1. A particle is one characteristic sample of the reduced
// radial phase space (r, w, l) carrying a quadrature weight.
namespace vpshell {

struct Particle {
    double R;      // radial position, > 0
    double W;      // radial momentum
    double L;      // squared angular momentum, >= 0, constant in time
    double weight; // contribution to the total mass, > 0, constant in time
};

// Discrete representation of f(t): particles with stable indices plus the
// snapshot time. total_mass is the index-ordered sum of weights, fixed at
// sampling time; weights never change afterwards.
struct Ensemble {
    std::vector<Particle> particles;
    double time = 0.0;
    double total_mass = 0.0;

    std::size_t size() const { return particles.size(); }
};

// sqrt(1 + w^2 + l/r^2), always >= 1.
inline double kinetic_energy(double R, double W, double L)
{
    if (R <= 0.0)
        throw std::domain_error("kinetic_energy: R must be positive");
    // L == 0 must not turn into 0/0 when R*R underflows near the origin
    const double q = W * W + (L == 0.0 ? 0.0 : L / (R * R));
    return std::sqrt(1.0 + q);
}

inline double kinetic_energy(const Particle &p)
{
    return kinetic_energy(p.R, p.W, p.L);
}

// |p-hat| = sqrt(w^2 + l/r^2) / sqrt(1 + w^2 + l/r^2), strictly < 1.
inline double speed(double R, double W, double L)
{
    if (R <= 0.0)
        throw std::domain_error("speed: R must be positive");
    const double q = W * W + (L == 0.0 ? 0.0 : L / (R * R));
    return std::sqrt(q) / std::sqrt(1.0 + q);
}

inline double speed(const Particle &p) { return speed(p.R, p.W, p.L); }

// Index-ordered serial sum; used everywhere a mass total is formed so that
// results do not depend on thread count.
inline double sum_weights(const Ensemble &e)
{
    double s = 0.0;
    for (const auto &p : e.particles)
        s += p.weight;
    return s;
}

} // namespace vpshell

#endif
