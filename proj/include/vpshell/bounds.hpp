#ifndef VPSHELL_BOUNDS_HPP
#define VPSHELL_BOUNDS_HPP

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "vpshell/core.hpp"
#include "vpshell/dynamics.hpp"
#include "vpshell/field.hpp"

namespace vpshell {

// Closed-form turning-point quantities for an inbound particle (w < 0)
// under any enclosed mass bounded by M.
struct Lemma1Quantities {
    double D;        // l + M r sqrt(1 + w^2 + l/r^2)
    double R_minus;  // r sqrt(l / (r^2 w^2 + l))
    double R_plus;   // r sqrt(D / (r^2 w^2 + D))
    double T0_lower; // r (1 - sqrt(D / (r^2 w^2 + D)))
    std::optional<double> T0_upper; // -w r^3 sqrt(1+w^2+l/r^2)/l; unbounded if l = 0
    double t_min;    // r |w| sqrt(1+w^2+l/r^2) / (w^2 + D/r^2)
};

Lemma1Quantities lemma1_quantities(double r, double w, double l, double M);

// Right-hand side of the turning-phase radius envelope:
//   (r - |w| t / gamma)^2 + D t^2 / (r^2 gamma^2)
double energy_upper_envelope(double r, double w, double l, double M, double t);

// Density and field lower bounds once all mass sits inside radius B:
// (3 M / (4 pi B^3), M / B^2).
struct Lemma3Bounds {
    double rho_lower;
    double field_lower;
};
Lemma3Bounds lemma3_bounds(double M, double B);

// Outcome of checking the five turning-point properties along one
// trajectory. Margins are positive when violated, normalized by the scale
// of the quantity; an entry passes when every margin is <= slack.
struct Lemma1CheckEntry {
    std::size_t index = 0;
    double detected_T0 = 0.0;
    std::array<double, 5> margin{}; // parts 1..5
    std::array<bool, 5> pass{};
    bool all_pass = false;
};

// Evaluate the five parts on explicit trajectory samples (t, R, W) that
// extend past the detected turning event.
Lemma1CheckEntry check_lemma1(const std::vector<double> &t, const std::vector<double> &R,
                              const std::vector<double> &W, double r, double w, double l,
                              double M, const TurningEvent &event, double slack);

// Aggregate over an ensemble; mergeable in index order.
struct LemmaReport {
    std::array<long, 5> pass_count{};
    std::array<long, 5> fail_count{};
    std::array<double, 5> worst_margin{};
    long particles_checked = 0;
    long particles_without_event = 0;
    double slack = 0.0;
    std::vector<Lemma1CheckEntry> entries; // filled only when verbose

    bool all_pass() const;
};

// Streaming evaluator for self-consistent runs: subscribe it to an
// EnsembleStepper, then finalize with the recorded turning events. Memory
// stays O(N); no trajectories are stored.
class LemmaChecker {
  public:
    LemmaChecker(const Ensemble &initial, double M, double slack, bool verbose = false);

    // Observer callback (time, ensemble view).
    void observe(double t, const Ensemble &e);

    LemmaReport finalize(const std::vector<std::optional<TurningEvent>> &events) const;

  private:
    struct PerParticle {
        double r, w, l;
        Lemma1Quantities q;
        double worst_W_before = -1e300;   // max W on pre-turn samples
        double worst_negW_after = -1e300; // max -W on post-turn samples
        double worst_energy = -1e300;     // part 4 violation
        double worst_envelope = -1e300;   // part 5 violation
        bool crossed = false;
        double cross_time = 0.0;
    };
    std::vector<PerParticle> per_;
    double M_;
    double slack_;
    bool verbose_;
};

} // namespace vpshell

#endif
