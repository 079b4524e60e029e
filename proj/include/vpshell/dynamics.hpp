#ifndef VPSHELL_DYNAMICS_HPP
#define VPSHELL_DYNAMICS_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "vpshell/core.hpp"
#include "vpshell/field.hpp"

namespace vpshell {

struct StepperConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double dt_init = 1e-3;
    double dt_min = 1e-12;
    double dt_max = 0.1;
    double safety = 0.9;
    // splitting control: largest allowed per-step change of any particle's
    // enclosed mass, as a fraction of the total mass
    double mass_step_frac = 0.05;
};

// First time a particle's radial momentum crosses zero from below, refined
// on the step's cubic dense output to absolute tolerance 1e-9.
struct TurningEvent {
    std::size_t index;
    double T0;
    double R_at_T0;
};

// Characteristic right-hand side under a prescribed enclosed mass:
//   dR = W / gamma,  dW = L/(R^3 gamma) + m/R^2,  gamma = sqrt(1+W^2+L/R^2)
void rhs(double R, double W, double L, double m_enclosed, double &dR, double &dW);

// Single-characteristic integration with constant enclosed mass mu.
// Accepted steps are recorded as samples. Particles with L = 0 that fall
// below the origin floor are frozen and the straight-line crossing time is
// extrapolated.
struct SingleResult {
    std::vector<double> t, R, W;
    std::optional<TurningEvent> event;
    std::optional<double> origin_crossing_time;
    bool frozen = false;
};

SingleResult integrate_characteristic(double r, double w, double l, double mu,
                                      double t_end, const StepperConfig &cfg,
                                      bool stop_after_turn = false);

// Self-consistent ensemble integrator. All particles advance with a common
// adaptive step; the mass profile is rebuilt once per accepted step and the
// per-particle enclosed mass is frozen across the step's stages. Per-particle
// stage work runs in parallel; every floating-point reduction is a serial
// index-ordered loop, so results are independent of the thread count.
class EnsembleStepper {
  public:
    using Observer = std::function<void(double t, const Ensemble &, const MassProfile &)>;

    EnsembleStepper(Ensemble initial, StepperConfig cfg);

    void add_observer(Observer obs) { observers_.push_back(std::move(obs)); }

    // Advance to exactly t_end (final step clipped). No-op if t_end equals
    // the current time. Throws std::runtime_error on step-size underflow.
    void advance_to(double t_end);

    // Keep stepping until every particle has a recorded turning event or
    // the time cap is reached. Returns true when all particles turned.
    bool run_until_all_turned(double t_cap);

    const Ensemble &ensemble() const { return state_; }
    const MassProfile &profile() const { return profile_; }
    const std::vector<std::optional<TurningEvent>> &events() const { return events_; }
    bool all_turned() const;
    long accepted_steps() const { return accepted_; }
    long rejected_steps() const { return rejected_; }

  private:
    bool attempt_step(double dt, double &err);
    void freeze_midpoint_field(double dt);
    double proposed_mass_shift();
    void accept_step(double dt);
    double geometric_cap() const;
    void notify();

    Ensemble state_;
    MassProfile profile_;
    StepperConfig cfg_;
    double dt_;
    long accepted_ = 0;
    long rejected_ = 0;

    std::vector<std::optional<TurningEvent>> events_;
    std::vector<char> frozen_;
    std::vector<double> mu_;            // frozen enclosed mass per particle
    std::vector<double> newR_, newW_;   // proposed state
    std::vector<double> k1R_, k1W_, k7R_, k7W_; // endpoint derivatives
    std::vector<double> errs_;
    Ensemble proposal_;            // scratch state for the splitting control
    MassProfile proposal_profile_; // profile of the proposed state
    std::vector<Observer> observers_;
};

} // namespace vpshell

#endif
