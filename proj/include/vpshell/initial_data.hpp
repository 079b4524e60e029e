#ifndef VPSHELL_INITIAL_DATA_HPP
#define VPSHELL_INITIAL_DATA_HPP

#include <optional>

#include "vpshell/core.hpp"

namespace vpshell {

// Momentum-space bump H(s) = c (1-s)^4 on [0,1], zero beyond, with c fixed
// by the normalization \int_{R^3} H(|u|^2) du = 3/(4 pi).
struct BumpProfile {
    double c;

    double operator()(double s) const
    {
        if (s >= 1.0)
            return 0.0;
        const double q = 1.0 - s;
        const double q2 = q * q;
        return c * q2 * q2;
    }
};

// c = 10395 / (2048 pi^2), from 4 pi c \int_0^1 s^2 (1-s^2)^4 ds = 3/(4 pi)
// with \int_0^1 s^2 (1-s^2)^4 ds = 128/3465.
BumpProfile make_bump_profile();

// Parameters of the concentrating-shell data. target_mass absent selects
// the unscaled variant; present selects the mass-rescaled variant whose
// sampled weights are post-normalized to hit target_mass exactly.
struct ShellDataSpec {
    double a0;
    double epsilon;
    std::optional<double> target_mass;
};

// Uniform cell grid over the (r, w, l) support box; particles are placed at
// cell midpoints. The l axis starts strictly above zero so every sampled
// particle has positive angular momentum.
struct SamplingGrid {
    int Nr = 32;
    int Nw = 64;
    int Nl = 32;

    double r_lo, r_hi;
    double w_lo, w_hi;
    double l_lo, l_hi;

    // Axis bounds implied by the support conditions of the shell data.
    static SamplingGrid for_spec(const ShellDataSpec &spec, int Nr = 32, int Nw = 64,
                                 int Nl = 32);
};

// Smooth radial cutoff: 1 on the plateau [a0 - eps^3/2, a0 + eps^3/2],
// 0 outside [a0 - eps^3, a0 + eps^3], quintic-smoothstep transitions.
double cutoff(const ShellDataSpec &spec, double r);

// Phase-space value of the shell data at (r, w, l):
//   H_eps((r/eps^2 + a0 w)^2 + l (a0/r)^2) * cutoff(r),
// scaled by target_mass/|f1|_1 for the rescaled variant (the scaling is
// applied at sampling time; f0_value returns the unscaled integrand).
double f0_value(const ShellDataSpec &spec, double r, double w, double l);

// Midpoint-rule quadrature: one particle per nonempty cell, with weight
// 4 pi^2 f0 dr dw dl. Throws std::runtime_error if the grid misses the
// support entirely.
Ensemble sample(const ShellDataSpec &spec, const SamplingGrid &grid);

// Analytic initial density 3/(4 pi a0^3) * cutoff(r), scaled for the
// rescaled variant by target_mass over the analytic |f1|_1.
double initial_density_profile(const ShellDataSpec &spec, double r);

// |f1|_1 evaluated with the same midpoint quadrature used by sample();
// the rescaled variant divides by this so its total hits target_mass.
double quadrature_mass(const ShellDataSpec &spec, const SamplingGrid &grid);

// |f1|_1 = (3/a0^3) \int cutoff(r) r^2 dr by adaptive-free composite
// Simpson quadrature over the cutoff support (tolerance well below 1e-10).
double analytic_mass(const ShellDataSpec &spec);

} // namespace vpshell

#endif
