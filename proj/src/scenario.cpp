#include "vpshell/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

namespace vpshell {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kEpsFloor = 1e-6;
// smallest turning radius the double-precision stepper can resolve; the
// deepest shells turn near sqrt(l_min)/|w| ~ 0.2 eps^3 on default grids
constexpr double kResolvableRadius = 1e-10;

void add(std::vector<PlanCondition> &v, const std::string &name, double value,
         double threshold, bool ok)
{
    v.push_back({name, value, threshold, ok});
}

ScenarioSetup evaluate_theorem1(double C1, double C2, double eps)
{
    ScenarioSetup s;
    s.kind = ScenarioSetup::Kind::theorem1;
    s.C1 = C1;
    s.C2 = C2;
    s.epsilon = eps;
    s.a0 = std::cbrt(32.0 / C1);
    s.T = s.a0 - 9.0 * eps * eps;
    s.radius_bound = 20.0 * eps * eps;

    const double e2 = eps * eps;
    const double e3 = e2 * eps;
    const double a0 = s.a0;
    const double mass_lo = 3.0 * e3 / a0;
    const double mass_hi = 8.0 * e3 / a0;
    s.predicted_rho_lower =
        3.0 * mass_lo / (4.0 * kPi * std::pow(s.radius_bound, 3.0));
    s.predicted_field_lower = mass_lo / (s.radius_bound * s.radius_bound);
    s.T0_margin = 0.0; // Theorem-1 turning floor is T itself

    auto &c = s.conditions;
    add(c, "epsilon_below_a0_over_9", eps, a0 / 9.0, eps < a0 / 9.0);
    // radial window: a0 - e3 > a0/2 and the w interval inside
    // (-3/2 eps^-2, -1/2 eps^-2)
    add(c, "support_inside_half_a0", e3, 0.5 * a0, e3 < 0.5 * a0);
    const double w_wide = 1.0 / e2 + 2.0 * eps / a0;
    add(c, "w_interval_inside_bracket", w_wide, 1.5 / e2, w_wide < 1.5 / e2);
    // l < (3/2)^2 eps^2 <= 1
    const double l_max = 2.25 * e2;
    add(c, "l_bound_below_one", l_max, 1.0, l_max <= 1.0);
    // D <= 4 with worst-case support factors
    const double D_max =
        l_max + mass_hi * 1.5 * a0 *
                    std::sqrt(1.0 + 2.25 / (e2 * e2) + 4.0 / (a0 * a0));
    add(c, "D_bound", D_max, 4.0, D_max <= 4.0);
    // turning-time floor: (a0 - e3) - sqrt(D)/|w| >= T
    const double t0_floor = (a0 - e3) - std::sqrt(std::min(D_max, 4.0)) /
                                            (0.5 / e2);
    add(c, "T0_floor_exceeds_T", t0_floor, s.T, t0_floor > s.T);
    // initial bounds against C1
    const double rho0 = 3.0 / (4.0 * kPi * a0 * a0 * a0);
    add(c, "initial_density_below_C1", rho0, C1, rho0 <= C1);
    const double field0 = 32.0 / (a0 * a0 * a0);
    add(c, "initial_field_below_C1", field0, C1, field0 <= C1 * (1.0 + 1e-12));
    // concentration targets
    add(c, "predicted_density_reaches_C2", s.predicted_rho_lower, C2,
        s.predicted_rho_lower >= C2);
    add(c, "predicted_field_reaches_C2", s.predicted_field_lower, C2,
        s.predicted_field_lower >= C2);
    const double r_turn = 0.2 * e3 * a0;
    add(c, "turning_radius_resolvable", r_turn, kResolvableRadius,
        r_turn >= kResolvableRadius);

    s.all_conditions_ok =
        std::all_of(c.begin(), c.end(), [](const PlanCondition &p) { return p.ok; });
    return s;
}

ScenarioSetup evaluate_theorem2(double C1, double C2, double T, double eps)
{
    ScenarioSetup s;
    s.kind = ScenarioSetup::Kind::theorem2;
    s.C1 = C1;
    s.C2 = C2;
    s.epsilon = eps;
    s.C0 = std::sqrt(C1 * T);
    s.T = T;
    s.a0 = T + 16.0 * s.C0 * eps;
    s.target_mass = C1;
    s.radius_bound = 20.0 * s.C0 * eps;
    s.predicted_rho_lower = 3.0 * C1 / (4.0 * kPi * std::pow(s.radius_bound, 3.0));
    s.predicted_field_lower = C1 / (s.radius_bound * s.radius_bound);
    s.T0_margin = 12.0 * s.C0 * eps - eps * eps * eps;

    const double e2 = eps * eps;
    const double e3 = e2 * eps;
    const double a0 = s.a0;
    auto &c = s.conditions;
    add(c, "support_inside_half_a0", e3, 0.5 * a0, e3 < 0.5 * a0);
    const double w_wide = 1.0 / e2 + 2.0 * eps / T;
    add(c, "w_interval_inside_bracket", w_wide, 1.5 / e2, w_wide < 1.5 / e2);
    const double l_max = std::pow((a0 + e3) / a0, 2.0) * e2;
    add(c, "l_bound_below_one", l_max, 1.0, l_max <= 1.0);
    const double D_max =
        l_max + C1 * (a0 + e3) *
                    std::sqrt(1.0 + 2.25 / (e2 * e2) + 4.0 / (a0 * a0));
    const double D_cap = 4.0 * s.C0 * s.C0 / e2;
    add(c, "D_bound", D_max, D_cap, D_max <= D_cap);
    const double t0_floor = (a0 - e3) - std::sqrt(D_cap) / (0.5 / e2);
    add(c, "T0_floor_exceeds_T", t0_floor, T, t0_floor >= T);
    add(c, "predicted_density_reaches_C2", s.predicted_rho_lower, C2,
        s.predicted_rho_lower >= C2);
    add(c, "predicted_field_reaches_C2", s.predicted_field_lower, C2,
        s.predicted_field_lower >= C2);
    const double r_turn = 0.2 * e3 * a0;
    add(c, "turning_radius_resolvable", r_turn, kResolvableRadius,
        r_turn >= kResolvableRadius);

    s.all_conditions_ok =
        std::all_of(c.begin(), c.end(), [](const PlanCondition &p) { return p.ok; });
    return s;
}

std::string failed_conditions(const ScenarioSetup &s)
{
    std::ostringstream out;
    for (const auto &c : s.conditions)
        if (!c.ok)
            out << ' ' << c.name;
    return out.str();
}
} // namespace

ScenarioSetup plan_theorem1(double C1, double C2, std::optional<double> epsilon_hint,
                            bool epsilon_forced)
{
    if (C1 <= 0.0 || C2 <= 0.0)
        throw std::domain_error("plan_theorem1: C1, C2 must be positive");
    double eps = epsilon_hint.value_or(0.1);
    if (epsilon_forced) {
        ScenarioSetup s = evaluate_theorem1(C1, C2, eps);
        s.epsilon_forced = true;
        if (s.T <= 0.0)
            throw PlannerError("plan_theorem1: forced epsilon gives T <= 0");
        return s;
    }
    ScenarioSetup s;
    while (eps >= kEpsFloor) {
        s = evaluate_theorem1(C1, C2, eps);
        if (s.all_conditions_ok)
            return s;
        eps *= 0.5;
    }
    throw PlannerError("plan_theorem1: epsilon underflow; failing conditions:" +
                       failed_conditions(s));
}

ScenarioSetup plan_theorem2(double C1, double C2, double T,
                            std::optional<double> epsilon_hint, bool epsilon_forced)
{
    if (C1 <= 0.0 || C2 <= 0.0 || T <= 0.0)
        throw std::domain_error("plan_theorem2: C1, C2, T must be positive");
    double eps = epsilon_hint.value_or(0.1);
    if (epsilon_forced) {
        ScenarioSetup s = evaluate_theorem2(C1, C2, T, eps);
        s.epsilon_forced = true;
        return s;
    }
    ScenarioSetup s;
    while (eps >= kEpsFloor) {
        s = evaluate_theorem2(C1, C2, T, eps);
        if (s.all_conditions_ok)
            return s;
        eps *= 0.5;
    }
    throw PlannerError("plan_theorem2: epsilon underflow; failing conditions:" +
                       failed_conditions(s));
}

bool ScenarioReport::all_pass() const
{
    auto ok = [](const std::vector<Check> &v) {
        return std::all_of(v.begin(), v.end(), [](const Check &c) { return c.ok; });
    };
    return ok(initial_checks) && ok(final_checks) && lemma1.all_pass() && all_turned;
}

ScenarioReport run_scenario(const ScenarioSetup &setup, const SamplingGrid &grid,
                            const StepperConfig &cfg, std::optional<double> extend_to,
                            double lemma_slack)
{
    ScenarioReport rep;
    rep.setup = setup;
    rep.Nr = grid.Nr;
    rep.Nw = grid.Nw;
    rep.Nl = grid.Nl;
    rep.stepper = cfg;

    const ShellDataSpec spec{setup.a0, setup.epsilon, setup.target_mass};
    Ensemble e0 = sample(spec, grid);
    rep.particle_count = e0.size();
    rep.sampled_mass = e0.total_mass;

    const double M = e0.total_mass;
    const double e3 = std::pow(setup.epsilon, 3.0);

    // ----- initial-state claims -----
    // the C1 smallness claims belong to the small-data variant; the
    // fixed-mass variant claims only the exact total mass
    if (setup.kind == ScenarioSetup::Kind::theorem1) {
        const double rho0 = initial_density_profile(spec, setup.a0);
        rep.initial_checks.push_back(
            {"analytic_sup_rho0_below_C1", rho0, setup.C1, true, rho0 <= setup.C1});
        const double field0 = MassProfile::build(e0).sup_field();
        rep.initial_checks.push_back(
            {"sup_field0_below_C1", field0, setup.C1, true, field0 <= setup.C1});
        const double lo = 3.0 * e3 / setup.a0 * 0.99;
        const double hi = 8.0 * e3 / setup.a0 * 1.01;
        rep.initial_checks.push_back(
            {"sampled_mass_above_sandwich", M, lo, false, M >= lo});
        rep.initial_checks.push_back(
            {"sampled_mass_below_sandwich", M, hi, true, M <= hi});
    } else {
        rep.initial_checks.push_back({"total_mass_equals_C1_exactly", M, setup.C1, true,
                                      M == setup.C1});
    }

    // ----- integrate -----
    EnsembleStepper stepper(std::move(e0), cfg);
    TimeSeriesRecorder recorder;
    LemmaChecker lemma(stepper.ensemble(), M, lemma_slack);
    ConservationMonitor conservation(stepper.ensemble());
    stepper.add_observer([&](double t, const Ensemble &e, const MassProfile &p) {
        recorder.observe(t, e, p);
        lemma.observe(t, e);
        conservation.observe(t, e, p);
    });

    stepper.advance_to(setup.T);

    rep.max_radius_at_T = stepper.profile().max_radius();
    rep.certified_density =
        density_ball_average(stepper.ensemble(), rep.max_radius_at_T);
    rep.certified_field = stepper.profile().sup_field();

    // continue past T until every particle has turned
    rep.all_turned = stepper.run_until_all_turned(1.5 * setup.a0 + setup.T);
    if (extend_to && *extend_to > stepper.ensemble().time)
        stepper.advance_to(*extend_to);

    rep.lemma1 = lemma.finalize(stepper.events());
    rep.series = recorder.series();
    rep.accepted_steps = stepper.accepted_steps();

    // ----- final checks -----
    rep.final_checks.push_back({"max_radius_at_T", rep.max_radius_at_T,
                                setup.radius_bound * 1.1, true,
                                rep.max_radius_at_T <= setup.radius_bound * 1.1});
    rep.final_checks.push_back({"certified_density_reaches_C2", rep.certified_density,
                                setup.C2, false, rep.certified_density >= setup.C2});
    rep.final_checks.push_back({"certified_field_reaches_C2", rep.certified_field,
                                setup.C2, false, rep.certified_field >= setup.C2});

    double min_T0 = 1e300;
    bool events_complete = true;
    for (const auto &ev : stepper.events()) {
        if (!ev) {
            events_complete = false;
            continue;
        }
        min_T0 = std::min(min_T0, ev->T0);
    }
    rep.min_T0 = events_complete ? min_T0 : 0.0;
    const double t0_floor = setup.T + setup.T0_margin;
    rep.final_checks.push_back({"every_T0_exceeds_floor", rep.min_T0, t0_floor, false,
                                events_complete && rep.min_T0 > t0_floor});
    rep.final_checks.push_back(
        {"lemma1_all_parts_pass", double(rep.lemma1.particles_checked -
                                         rep.lemma1.particles_without_event),
         double(rep.particle_count), false, rep.lemma1.all_pass()});
    rep.max_energy_drift = conservation.max_relative_energy_drift();
    // the tight drift budget is an invariant of the weak-field small-data
    // runs; the fixed-mass variant has O(1) self-gravity and the splitting
    // drift is reported but not gated
    if (setup.kind == ScenarioSetup::Kind::theorem1)
        rep.final_checks.push_back({"total_energy_relative_drift",
                                    rep.max_energy_drift, 1e-6, true,
                                    rep.max_energy_drift <= 1e-6});
    rep.final_checks.push_back({"mass_and_L_bit_constant",
                                conservation.mass_bit_constant() &&
                                        conservation.angular_momentum_bit_constant()
                                    ? 1.0
                                    : 0.0,
                                1.0, false,
                                conservation.mass_bit_constant() &&
                                    conservation.angular_momentum_bit_constant()});
    rep.final_checks.push_back({"speeds_below_one",
                                conservation.speeds_below_one() ? 1.0 : 0.0, 1.0, false,
                                conservation.speeds_below_one()});
    rep.final_checks.push_back({"inbound_kinetic_energy_monotone",
                                conservation.max_inbound_energy_increase(), 1e-8, true,
                                conservation.max_inbound_energy_increase() <= 1e-8});
    return rep;
}

namespace {
nlohmann::json checks_json(const std::vector<Check> &checks)
{
    nlohmann::json arr = nlohmann::json::array();
    for (const auto &c : checks)
        arr.push_back({{"name", c.name},
                       {"measured", c.measured},
                       {"bound", c.bound},
                       {"kind", c.is_upper_bound ? "upper" : "lower"},
                       {"pass", c.ok}});
    return arr;
}
} // namespace

nlohmann::json ScenarioReport::to_json() const
{
    nlohmann::json j;
    j["inputs"] = {{"kind", setup.kind == ScenarioSetup::Kind::theorem1 ? "theorem1"
                                                                        : "theorem2"},
                   {"C1", setup.C1},
                   {"C2", setup.C2},
                   {"T_requested",
                    setup.kind == ScenarioSetup::Kind::theorem2 ? setup.T : 0.0},
                   {"epsilon", setup.epsilon},
                   {"epsilon_forced", setup.epsilon_forced},
                   {"grid", {{"Nr", Nr}, {"Nw", Nw}, {"Nl", Nl}}},
                   {"stepper",
                    {{"rel_tol", stepper.rel_tol},
                     {"abs_tol", stepper.abs_tol},
                     {"dt_init", stepper.dt_init},
                     {"dt_min", stepper.dt_min},
                     {"dt_max", stepper.dt_max},
                     {"safety", stepper.safety}}}};

    nlohmann::json conds = nlohmann::json::array();
    for (const auto &c : setup.conditions)
        conds.push_back({{"name", c.name},
                         {"value", c.value},
                         {"threshold", c.threshold},
                         {"ok", c.ok}});
    j["resolved_parameters"] = {{"a0", setup.a0},
                                {"T", setup.T},
                                {"C0", setup.C0},
                                {"radius_bound", setup.radius_bound},
                                {"predicted_rho_lower", setup.predicted_rho_lower},
                                {"predicted_field_lower", setup.predicted_field_lower},
                                {"particle_count", particle_count},
                                {"sampled_mass", sampled_mass},
                                {"conditions", conds},
                                {"all_conditions_ok", setup.all_conditions_ok}};

    j["initial_checks"] = checks_json(initial_checks);
    j["final_checks"] = checks_json(final_checks);

    nlohmann::json lem;
    lem["slack"] = lemma1.slack;
    lem["particles_checked"] = lemma1.particles_checked;
    lem["particles_without_event"] = lemma1.particles_without_event;
    for (int k = 0; k < 5; ++k) {
        lem["parts"].push_back({{"part", k + 1},
                                {"pass_count", lemma1.pass_count[k]},
                                {"fail_count", lemma1.fail_count[k]},
                                {"worst_margin", lemma1.worst_margin[k]}});
    }
    lem["all_pass"] = lemma1.all_pass();
    j["lemma1_aggregate"] = lem;

    j["summary"] = {{"max_energy_drift", max_energy_drift},
                    {"max_radius_at_T", max_radius_at_T},
                    {"certified_density", certified_density},
                    {"certified_field", certified_field},
                    {"min_T0", min_T0},
                    {"accepted_steps", accepted_steps},
                    {"all_turned", all_turned},
                    {"all_pass", all_pass()}};
    j["time_series_path"] = time_series_path;
    return j;
}

} // namespace vpshell
