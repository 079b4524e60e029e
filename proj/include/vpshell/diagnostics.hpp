#ifndef VPSHELL_DIAGNOSTICS_HPP
#define VPSHELL_DIAGNOSTICS_HPP

#include <cstddef>
#include <vector>

#include "vpshell/core.hpp"
#include "vpshell/field.hpp"

namespace vpshell {

struct TimeSeriesRow {
    double t;
    double sup_rho;
    double sup_field;
    double r_min;
    double r_max;
    double kinetic;
    double field_energy;
    double total_energy;
};

struct TimeSeries {
    std::vector<TimeSeriesRow> rows;
};

// Mass inside the closed ball of radius B over the ball volume; a certified
// lower bound for sup rho whenever all mass lies inside B.
double density_ball_average(const Ensemble &e, double B);

// Shell-histogram estimate combined with ball averages at a few candidate
// radii; always a valid lower-bound-style estimate of sup rho.
double sup_rho_estimate(const Ensemble &e, const MassProfile &profile);
double sup_rho_estimate(const Ensemble &e);

// Pairwise shell interaction energy sum_{i<j} w_i w_j / max(R_i, R_j),
// evaluated as the index-ordered sum of w_i * enclosed_mass_i / R_i. This is
// the exactly conserved potential energy of the discrete dynamics; it equals
// field_energy minus the per-particle self-energy sampling artifact.
double interaction_energy(const Ensemble &e, const MassProfile &profile);

// Least-squares slopes of log sup_rho and log sup_field against log t over
// [t_start, t_end]. Requires at least 10 rows in the window.
struct DecayFit {
    double rho_exponent;
    double field_exponent;
};
DecayFit decay_fit(const TimeSeries &series, double t_start, double t_end);

// Observer that appends one row per accepted step. Kinetic energy is the
// index-ordered weighted sum of particle gammas.
class TimeSeriesRecorder {
  public:
    void observe(double t, const Ensemble &e, const MassProfile &profile);
    const TimeSeries &series() const { return series_; }

  private:
    TimeSeries series_;
};

// Conservation and monotonicity watchdog: total mass and per-particle L are
// bit-constant, speeds stay below 1, total energy drift stays bounded, and
// the kinetic energy of each particle never increases while it is inbound.
class ConservationMonitor {
  public:
    explicit ConservationMonitor(const Ensemble &initial);

    void observe(double t, const Ensemble &e, const MassProfile &profile);

    bool mass_bit_constant() const { return mass_ok_; }
    bool angular_momentum_bit_constant() const { return l_ok_; }
    bool speeds_below_one() const { return speed_ok_; }
    double max_relative_energy_drift() const { return max_drift_; }
    // largest per-step increase of gamma while W <= 0 (should be ~0)
    double max_inbound_energy_increase() const { return max_gamma_rise_; }

  private:
    std::vector<double> L0_, w0_;
    std::vector<double> prev_gamma_, prev_W_;
    double mass0_;
    double energy0_ = 0.0;
    bool have_energy0_ = false;
    bool mass_ok_ = true, l_ok_ = true, speed_ok_ = true;
    double max_drift_ = 0.0;
    double max_gamma_rise_ = -1e300;
};

} // namespace vpshell

#endif
