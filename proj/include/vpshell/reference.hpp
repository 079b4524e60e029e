#ifndef VPSHELL_REFERENCE_HPP
#define VPSHELL_REFERENCE_HPP

#include <optional>
#include <vector>

#include "vpshell/dynamics.hpp"

// Serial reference integrators, kept independent of the adaptive stepper.
// These are the oracles the test suites check the production path against.
namespace vpshell::reference {

// Exact force-free radius: |x0 + p-hat t| expressed radially,
//   R(t)^2 = r^2 + 2 r (w/gamma) t + ((w^2 + l/r^2)/gamma^2) t^2.
double free_streaming_radius(double r, double w, double l, double t);

// Fixed-step classical RK4 along one characteristic with constant enclosed
// mass mu. Steps with dt until t_end, recording every step.
struct Trajectory {
    std::vector<double> t, R, W;
    std::optional<TurningEvent> event; // cubic-interpolated first W zero
};

Trajectory integrate_rk4(double r, double w, double l, double mu, double t_end, double dt);

// Integrate until the particle turns (W > 0) plus a trailing margin; dt is
// chosen as a fixed fraction of the parabola-minimum time scale.
Trajectory integrate_until_turned(double r, double w, double l, double mu, double M,
                                  int steps_per_tmin = 20000);

} // namespace vpshell::reference

#endif
