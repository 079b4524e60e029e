#include "vpshell/initial_data.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace vpshell {

namespace {
constexpr double kPi = 3.14159265358979323846;

double smoothstep5(double s)
{
    if (s <= 0.0)
        return 0.0;
    if (s >= 1.0)
        return 1.0;
    return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}
} // namespace

BumpProfile make_bump_profile()
{
    // 4 pi c * (128/3465) = 3/(4 pi)  =>  c = 10395/(2048 pi^2)
    return BumpProfile{10395.0 / (2048.0 * kPi * kPi)};
}

double cutoff(const ShellDataSpec &spec, double r)
{
    const double e3 = spec.epsilon * spec.epsilon * spec.epsilon;
    const double half = 0.5 * e3;
    const double d = std::abs(r - spec.a0);
    if (d <= half)
        return 1.0;
    if (d >= e3)
        return 0.0;
    return smoothstep5((e3 - d) / half);
}

double f0_value(const ShellDataSpec &spec, double r, double w, double l)
{
    if (r <= 0.0)
        throw std::domain_error("f0_value: r must be positive");
    if (l < 0.0)
        throw std::domain_error("f0_value: l must be nonnegative");
    const double phi = cutoff(spec, r);
    if (phi == 0.0)
        return 0.0;
    const double eps = spec.epsilon;
    const double e2 = eps * eps;
    const double u = r / e2 + spec.a0 * w;
    const double arg = u * u + l * (spec.a0 / r) * (spec.a0 / r);
    if (arg >= e2)
        return 0.0;
    static const BumpProfile H = make_bump_profile();
    double f = H(arg / e2) / (eps * eps * eps) * phi;
    if (spec.target_mass)
        f *= *spec.target_mass / analytic_mass(spec);
    return f;
}

SamplingGrid SamplingGrid::for_spec(const ShellDataSpec &spec, int Nr, int Nw, int Nl)
{
    SamplingGrid g;
    g.Nr = Nr;
    g.Nw = Nw;
    g.Nl = Nl;
    const double a0 = spec.a0;
    const double eps = spec.epsilon;
    const double e2 = eps * eps;
    const double e3 = e2 * eps;
    g.r_lo = a0 - e3;
    g.r_hi = a0 + e3;
    // |r/eps^2 + a0 w| < eps  =>  w in (-r/(a0 eps^2) - eps/a0, ... + eps/a0)
    g.w_lo = -g.r_hi / (a0 * e2) - eps / a0;
    g.w_hi = -g.r_lo / (a0 * e2) + eps / a0;
    // l < (r/a0)^2 eps^2; start strictly above zero (S_+ only)
    const double l_max = (g.r_hi / a0) * (g.r_hi / a0) * e2;
    g.l_lo = l_max * 1e-12;
    g.l_hi = l_max;
    return g;
}

Ensemble sample(const ShellDataSpec &spec, const SamplingGrid &grid)
{
    const double dr = (grid.r_hi - grid.r_lo) / grid.Nr;
    const double dw = (grid.w_hi - grid.w_lo) / grid.Nw;
    const double dl = (grid.l_hi - grid.l_lo) / grid.Nl;
    const double cell = 4.0 * kPi * kPi * dr * dw * dl;

    const long n_cells = static_cast<long>(grid.Nr) * grid.Nw * grid.Nl;
    std::vector<double> values(static_cast<std::size_t>(n_cells));

    // Cells evaluate independently with the unscaled integrand; the mass
    // rescaling is applied once below.
    const ShellDataSpec unscaled{spec.a0, spec.epsilon, std::nullopt};
#pragma omp parallel for schedule(static)
    for (long c = 0; c < n_cells; ++c) {
        const int ir = static_cast<int>(c / (static_cast<long>(grid.Nw) * grid.Nl));
        const int iw = static_cast<int>((c / grid.Nl) % grid.Nw);
        const int il = static_cast<int>(c % grid.Nl);
        const double r = grid.r_lo + (ir + 0.5) * dr;
        const double w = grid.w_lo + (iw + 0.5) * dw;
        const double l = grid.l_lo + (il + 0.5) * dl;
        values[static_cast<std::size_t>(c)] = f0_value(unscaled, r, w, l);
    }

    Ensemble e;
    // Fixed cell enumeration order gives stable particle indices and a
    // bit-reproducible weight sum.
    for (long c = 0; c < n_cells; ++c) {
        const double f = values[static_cast<std::size_t>(c)];
        if (f <= 0.0)
            continue;
        const int ir = static_cast<int>(c / (static_cast<long>(grid.Nw) * grid.Nl));
        const int iw = static_cast<int>((c / grid.Nl) % grid.Nw);
        const int il = static_cast<int>(c % grid.Nl);
        Particle p;
        p.R = grid.r_lo + (ir + 0.5) * dr;
        p.W = grid.w_lo + (iw + 0.5) * dw;
        p.L = grid.l_lo + (il + 0.5) * dl;
        p.weight = cell * f;
        e.particles.push_back(p);
    }
    if (e.particles.empty())
        throw std::runtime_error("sample: grid missed the support of f0");

    e.total_mass = sum_weights(e);

    if (spec.target_mass) {
        // Post-normalize so the index-ordered weight sum equals target_mass
        // bit-exactly; a couple of fix-up passes absorb rounding residue.
        const double target = *spec.target_mass;
        double s = target / e.total_mass;
        for (auto &p : e.particles)
            p.weight *= s;
        for (int pass = 0; pass < 8; ++pass) {
            const double total = sum_weights(e);
            if (total == target)
                break;
            e.particles.back().weight += target - total;
        }
        e.total_mass = sum_weights(e);
    }
    e.time = 0.0;
    return e;
}

double quadrature_mass(const ShellDataSpec &spec, const SamplingGrid &grid)
{
    ShellDataSpec unscaled{spec.a0, spec.epsilon, std::nullopt};
    return sample(unscaled, grid).total_mass;
}

double analytic_mass(const ShellDataSpec &spec)
{
    // (3/a0^3) \int phi(r) r^2 dr, composite Simpson on the support
    const double e3 = spec.epsilon * spec.epsilon * spec.epsilon;
    const double lo = spec.a0 - e3;
    const double hi = spec.a0 + e3;
    const int n = 4096; // even
    const double h = (hi - lo) / n;
    auto g = [&](double r) { return cutoff(spec, r) * r * r; };
    double s = g(lo) + g(hi);
    for (int i = 1; i < n; ++i)
        s += g(lo + i * h) * (i % 2 ? 4.0 : 2.0);
    return (3.0 / (spec.a0 * spec.a0 * spec.a0)) * s * h / 3.0;
}

double initial_density_profile(const ShellDataSpec &spec, double r)
{
    if (r <= 0.0)
        throw std::domain_error("initial_density_profile: r must be positive");
    double rho = 3.0 / (4.0 * kPi * spec.a0 * spec.a0 * spec.a0) * cutoff(spec, r);
    if (spec.target_mass)
        rho *= *spec.target_mass / analytic_mass(spec);
    return rho;
}

} // namespace vpshell
