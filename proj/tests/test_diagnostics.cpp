#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "vpshell/diagnostics.hpp"
#include "vpshell/dynamics.hpp"
#include "vpshell/field.hpp"

using namespace vpshell;

namespace {
constexpr double kPi = 3.14159265358979323846;

Ensemble random_ensemble(unsigned seed, int n, double r_lo, double r_hi)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> ur(0.0, 1.0);
    Ensemble e;
    for (int i = 0; i < n; ++i)
        e.particles.push_back({r_lo + (r_hi - r_lo) * ur(rng), ur(rng) - 0.5,
                               0.1 * ur(rng), 1e-3 * (0.5 + ur(rng))});
    e.total_mass = sum_weights(e);
    return e;
}
} // namespace

TEST_CASE("ball average recovers 3M/(4 pi B^3) when everything is inside")
{
    for (unsigned seed : {1u, 2u, 3u}) {
        const Ensemble e = random_ensemble(seed, 400, 0.05, 0.9);
        const double B = 1.0;
        const double expected = 3.0 * e.total_mass / (4.0 * kPi);
        CHECK(std::abs(density_ball_average(e, B) - expected) / expected < 1e-12);
    }
    CHECK_THROWS_AS(density_ball_average(Ensemble{}, 0.0), std::domain_error);
}

TEST_CASE("ball average counts the closed ball")
{
    Ensemble e;
    e.particles = {{1.0, 0, 0, 0.5}, {2.0, 0, 0, 0.25}};
    e.total_mass = 0.75;
    const double vol = 4.0 / 3.0 * kPi;
    CHECK(density_ball_average(e, 1.0) == doctest::Approx(0.5 / vol).epsilon(1e-15));
}

TEST_CASE("sup rho estimate dominates the ball average")
{
    const Ensemble e = random_ensemble(9, 1000, 0.2, 1.4);
    const MassProfile mp = MassProfile::build(e);
    const double est = sup_rho_estimate(e, mp);
    CHECK(est >= density_ball_average(e, mp.max_radius()) - 1e-15);
    CHECK(est == sup_rho_estimate(e));
}

TEST_CASE("interaction energy drops the self-energy part of the field energy")
{
    const Ensemble e = random_ensemble(4, 200, 0.3, 2.0);
    const MassProfile mp = MassProfile::build(e);
    double self = 0.0;
    for (const auto &p : e.particles)
        self += p.weight * p.weight / (2.0 * p.R);
    CHECK(interaction_energy(e, mp) ==
          doctest::Approx(mp.field_energy() - self).epsilon(1e-10));
}

TEST_CASE("decay fit recovers exact power laws")
{
    TimeSeries s;
    for (int k = 0; k < 64; ++k) {
        const double t = 1.0 + 0.25 * k;
        TimeSeriesRow row{};
        row.t = t;
        row.sup_rho = 7.5 * std::pow(t, -3.0);
        row.sup_field = 0.3 * std::pow(t, -2.0);
        s.rows.push_back(row);
    }
    const DecayFit fit = decay_fit(s, 1.0, 100.0);
    CHECK(fit.rho_exponent == doctest::Approx(-3.0).epsilon(1e-12));
    CHECK(fit.field_exponent == doctest::Approx(-2.0).epsilon(1e-12));

    CHECK_THROWS_AS(decay_fit(s, 90.0, 100.0), std::runtime_error);
}

TEST_CASE("recorder appends one row per observation")
{
    const Ensemble e = random_ensemble(6, 50, 0.5, 1.5);
    const MassProfile mp = MassProfile::build(e);
    TimeSeriesRecorder rec;
    rec.observe(0.0, e, mp);
    rec.observe(0.5, e, mp);
    REQUIRE(rec.series().rows.size() == 2);
    const auto &row = rec.series().rows[0];
    CHECK(row.t == 0.0);
    CHECK(row.r_min == mp.min_radius());
    CHECK(row.r_max == mp.max_radius());
    CHECK(row.total_energy == row.kinetic + row.field_energy);
    double kin = 0.0;
    for (const auto &p : e.particles)
        kin += p.weight * kinetic_energy(p);
    CHECK(row.kinetic == kin);
}

TEST_CASE("conservation monitor flags violations")
{
    Ensemble e = random_ensemble(8, 30, 0.5, 1.5);
    const MassProfile mp = MassProfile::build(e);
    ConservationMonitor mon(e);
    mon.observe(0.1, e, mp);
    CHECK(mon.mass_bit_constant());
    CHECK(mon.angular_momentum_bit_constant());
    CHECK(mon.speeds_below_one());
    CHECK(mon.max_relative_energy_drift() == 0.0);

    Ensemble tampered = e;
    tampered.particles[3].L += 1e-9;
    mon.observe(0.2, tampered, MassProfile::build(tampered));
    CHECK_FALSE(mon.angular_momentum_bit_constant());

    Ensemble lighter = e;
    lighter.particles[0].weight *= 0.5;
    lighter.total_mass = sum_weights(lighter);
    ConservationMonitor mon2(e);
    mon2.observe(0.1, lighter, MassProfile::build(lighter));
    CHECK_FALSE(mon2.mass_bit_constant());
}

TEST_CASE("inbound energy increase is tracked")
{
    Ensemble e;
    e.particles = {{1.0, -1.0, 0.5, 1.0}};
    e.total_mass = 1.0;
    ConservationMonitor mon(e);
    // inbound particle with rising gamma
    Ensemble worse = e;
    worse.particles[0].R = 0.9;
    worse.particles[0].W = -1.2;
    mon.observe(0.1, worse, MassProfile::build(worse));
    CHECK(mon.max_inbound_energy_increase() > 0.0);
}
