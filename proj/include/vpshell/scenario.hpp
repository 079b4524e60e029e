#ifndef VPSHELL_SCENARIO_HPP
#define VPSHELL_SCENARIO_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vpshell/bounds.hpp"
#include "vpshell/diagnostics.hpp"
#include "vpshell/dynamics.hpp"
#include "vpshell/initial_data.hpp"

namespace vpshell {

// No epsilon satisfies every planner condition before the underflow floor.
struct PlannerError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One numeric side-condition of the planner, re-evaluated at the chosen epsilon.
struct PlanCondition {
    std::string name;
    double value;
    double threshold;
    bool ok;
};

struct ScenarioSetup {
    enum class Kind { theorem1, theorem2 };
    Kind kind;

    double C1, C2;
    double epsilon;
    bool epsilon_forced = false;

    double a0;
    double T;
    std::optional<double> target_mass; // set for the fixed-mass variant

    double radius_bound;          // 20 eps^2 or 20 C0 eps
    double predicted_rho_lower;   // predicted density lower bound at T
    double predicted_field_lower; // predicted field lower bound at T
    double C0 = 0.0;              // fixed-mass variant only
    double T0_margin = 0.0;       // extra turning-time floor above T

    std::vector<PlanCondition> conditions;
    bool all_conditions_ok = false;
};

// Derive Theorem-1-style parameters from (C1, C2): a0 = (32/C1)^(1/3),
// T = a0 - 9 eps^2, epsilon chosen by halving from the hint until every
// condition holds. With a forced epsilon the conditions are evaluated and
// recorded but not enforced.
ScenarioSetup plan_theorem1(double C1, double C2, std::optional<double> epsilon_hint = {},
                            bool epsilon_forced = false);

// Theorem-2-style: C0 = sqrt(C1 T), M = C1, a0 = T + 16 C0 eps.
ScenarioSetup plan_theorem2(double C1, double C2, double T,
                            std::optional<double> epsilon_hint = {},
                            bool epsilon_forced = false);

struct Check {
    std::string name;
    double measured;
    double bound;
    bool is_upper_bound; // true: measured <= bound, false: measured >= bound
    bool ok;
};

struct ScenarioReport {
    ScenarioSetup setup;
    int Nr, Nw, Nl;
    StepperConfig stepper;
    std::size_t particle_count = 0;
    double sampled_mass = 0.0;

    std::vector<Check> initial_checks;
    std::vector<Check> final_checks;

    double max_radius_at_T = 0.0;
    double certified_density = 0.0; // ball average at B = max radius at T
    double certified_field = 0.0;   // exact sup of the discrete field at T
    double min_T0 = 0.0;
    double max_energy_drift = 0.0;

    LemmaReport lemma1;
    TimeSeries series;
    std::string time_series_path; // filled by the caller when written

    long accepted_steps = 0;
    bool all_turned = false;

    bool all_pass() const;
    nlohmann::json to_json() const;
};

// Sample the planned data, verify the initial-state claims, integrate to T,
// record the concentration checks, then continue until every particle has
// turned so the Lemma-1 report is complete. extend_to, when set, continues
// the run further (used by the late-time decay diagnostic).
ScenarioReport run_scenario(const ScenarioSetup &setup, const SamplingGrid &grid,
                            const StepperConfig &cfg,
                            std::optional<double> extend_to = {},
                            double lemma_slack = 1e-4);

} // namespace vpshell

#endif
