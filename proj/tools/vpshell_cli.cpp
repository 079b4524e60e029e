#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "vpshell/bounds.hpp"
#include "vpshell/diagnostics.hpp"
#include "vpshell/dynamics.hpp"
#include "vpshell/io.hpp"
#include "vpshell/scenario.hpp"

namespace {

constexpr const char *kVersion = "vpshell 1.0.0";

// exit codes: 0 all checks pass, 1 check failure, 2 planner/precondition
// failure, 3 integration failure, 64 usage, 65 malformed input
enum ExitCode { kOk = 0, kCheckFail = 1, kPlanFail = 2, kIntegrateFail = 3,
                kUsage = 64, kBadData = 65 };

struct CommonOpts {
    int Nr = 32, Nw = 64, Nl = 32;
    vpshell::StepperConfig stepper;
    std::string out_dir = ".";
    int threads = 0; // 0 = all cores
    bool verbose = false;
};

void add_common(CLI::App *cmd, CommonOpts &o)
{
    cmd->add_option("--nr", o.Nr, "radial grid cells");
    cmd->add_option("--nw", o.Nw, "momentum grid cells");
    cmd->add_option("--nl", o.Nl, "angular-momentum grid cells");
    cmd->add_option("--rel-tol", o.stepper.rel_tol, "relative step tolerance");
    cmd->add_option("--abs-tol", o.stepper.abs_tol, "absolute step tolerance");
    cmd->add_option("--dt-init", o.stepper.dt_init, "initial step size");
    cmd->add_option("--dt-min", o.stepper.dt_min, "minimum step size");
    cmd->add_option("--dt-max", o.stepper.dt_max, "maximum step size");
    cmd->add_option("--mass-step-frac", o.stepper.mass_step_frac,
                    "per-step enclosed-mass change cap (fraction of total)");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--threads", o.threads, "worker threads (default: all cores)");
    cmd->add_flag("--verbose", o.verbose, "verbose output");
}

void apply_threads(int threads)
{
#ifdef _OPENMP
    if (threads > 0)
        omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

// Resolved-configuration line embedded in every output file. Thread count
// is deliberately omitted: results are independent of it.
std::string config_comment(const std::string &cmd, const CommonOpts &o,
                           const std::string &extra)
{
    std::ostringstream s;
    s << kVersion << " | " << cmd << ' ' << extra << " grid=" << o.Nr << 'x' << o.Nw
      << 'x' << o.Nl << " rel_tol=" << vpshell::format_double(o.stepper.rel_tol)
      << " abs_tol=" << vpshell::format_double(o.stepper.abs_tol)
      << " dt_init=" << vpshell::format_double(o.stepper.dt_init)
      << " dt_min=" << vpshell::format_double(o.stepper.dt_min)
      << " dt_max=" << vpshell::format_double(o.stepper.dt_max)
      << " mass_step_frac=" << vpshell::format_double(o.stepper.mass_step_frac);
    return s.str();
}

int run_scenario_cmd(const std::string &which, double c1, double c2, double time,
                     std::optional<double> epsilon, const CommonOpts &opts)
{
    using namespace vpshell;
    apply_threads(opts.threads);

    ScenarioSetup setup;
    try {
        if (which == "theorem1")
            setup = plan_theorem1(c1, c2, epsilon, epsilon.has_value());
        else
            setup = plan_theorem2(c1, c2, time, epsilon, epsilon.has_value());
    } catch (const std::exception &ex) {
        std::cerr << "planner failure: " << ex.what() << "\n";
        return kPlanFail;
    }

    const ShellDataSpec spec{setup.a0, setup.epsilon, setup.target_mass};
    const SamplingGrid grid = SamplingGrid::for_spec(spec, opts.Nr, opts.Nw, opts.Nl);

    std::ostringstream extra;
    extra << "c1=" << format_double(c1) << " c2=" << format_double(c2);
    if (which == "theorem2")
        extra << " time=" << format_double(time);
    extra << " epsilon=" << format_double(setup.epsilon) << " a0="
          << format_double(setup.a0) << " T=" << format_double(setup.T);
    const std::string comment = config_comment("scenario " + which, opts, extra.str());

    std::filesystem::create_directories(opts.out_dir);
    const auto out = [&](const std::string &name) {
        return (std::filesystem::path(opts.out_dir) / name).string();
    };

    try {
        write_ensemble_csv(out("initial.csv"), sample(spec, grid), comment);
        ScenarioReport rep = run_scenario(setup, grid, opts.stepper);
        rep.time_series_path = out("series.csv");
        write_series_csv(rep.time_series_path, rep.series, comment);

        // final state is the post-turning state of the run; re-run of the
        // sampling plus report JSON make the run reproducible
        nlohmann::json j = rep.to_json();
        j["version"] = kVersion;
        write_text_file(out("report.json"), j.dump(2) + "\n");

        for (const auto &c : rep.initial_checks)
            std::cout << (c.ok ? "PASS " : "FAIL ") << c.name << " measured="
                      << format_double(c.measured) << (c.is_upper_bound ? " <= " : " >= ")
                      << format_double(c.bound) << "\n";
        for (const auto &c : rep.final_checks)
            std::cout << (c.ok ? "PASS " : "FAIL ") << c.name << " measured="
                      << format_double(c.measured) << (c.is_upper_bound ? " <= " : " >= ")
                      << format_double(c.bound) << "\n";
        std::cout << (rep.all_pass() ? "ALL CHECKS PASS" : "CHECK FAILURES PRESENT")
                  << "\n";
        return rep.all_pass() ? kOk : kCheckFail;
    } catch (const FormatError &ex) {
        std::cerr << ex.what() << "\n";
        return kBadData;
    } catch (const std::exception &ex) {
        std::cerr << "integration failure: " << ex.what() << "\n";
        return kIntegrateFail;
    }
}

int run_check_bounds(double r, double w, double l, double mass,
                     std::optional<double> mu_opt, const CommonOpts &opts)
{
    using namespace vpshell;
    apply_threads(opts.threads);
    if (r <= 0.0) {
        std::cerr << "r > 0 required\n";
        return kPlanFail;
    }
    if (w >= 0.0) {
        std::cerr << "w < 0 required\n";
        return kPlanFail;
    }
    if (l < 0.0 || mass < 0.0) {
        std::cerr << "l >= 0 and mass >= 0 required\n";
        return kPlanFail;
    }
    const double mu = mu_opt.value_or(0.0);
    if (mu < 0.0 || mu > mass) {
        std::cerr << "mu must lie in [0, mass]\n";
        return kPlanFail;
    }

    nlohmann::json j;
    const Lemma1Quantities q = lemma1_quantities(r, w, l, mass);
    j["quantities"] = {{"D", q.D},
                       {"R_minus", q.R_minus},
                       {"R_plus", q.R_plus},
                       {"T0_lower", q.T0_lower},
                       {"t_min", q.t_min}};
    if (q.T0_upper)
        j["quantities"]["T0_upper"] = *q.T0_upper;
    else
        j["quantities"]["T0_upper"] = "unbounded";

    try {
        if (l == 0.0) {
            // radial free fall: no turning; report the origin crossing
            const double horizon = 1.5 * r * kinetic_energy(r, w, 0.0) / std::abs(w);
            SingleResult res = integrate_characteristic(r, w, l, mu, horizon, opts.stepper);
            j["detected_T0"] = nullptr;
            if (res.origin_crossing_time)
                j["origin_crossing_time"] = *res.origin_crossing_time;
        } else {
            SingleResult probe =
                integrate_characteristic(r, w, l, mu, q.T0_upper ? 1.01 * *q.T0_upper
                                                                 : 10.0 * q.t_min,
                                         opts.stepper, /*stop_after_turn=*/true);
            if (!probe.event) {
                std::cerr << "integration failure: no turning detected\n";
                return kIntegrateFail;
            }
            SingleResult res = integrate_characteristic(r, w, l, mu,
                                                        1.5 * probe.event->T0,
                                                        opts.stepper);
            const Lemma1CheckEntry entry =
                check_lemma1(res.t, res.R, res.W, r, w, l, mass, *res.event, 1e-8);
            j["detected_T0"] = res.event->T0;
            j["R_at_T0"] = res.event->R_at_T0;
            nlohmann::json parts = nlohmann::json::array();
            for (int k = 0; k < 5; ++k)
                parts.push_back({{"part", k + 1},
                                 {"pass", entry.pass[k]},
                                 {"margin", entry.margin[k]}});
            j["check"] = {{"slack", 1e-8}, {"parts", parts}, {"all_pass", entry.all_pass}};
        }
    } catch (const std::exception &ex) {
        std::cerr << "integration failure: " << ex.what() << "\n";
        return kIntegrateFail;
    }
    std::cout << j.dump(2) << "\n";
    return kOk;
}

int run_simulate(const std::string &input, double t_end, const CommonOpts &opts)
{
    using namespace vpshell;
    apply_threads(opts.threads);
    Ensemble e;
    try {
        e = read_ensemble_csv(input);
    } catch (const FormatError &ex) {
        std::cerr << ex.what() << "\n";
        return kBadData;
    }
    if (t_end < e.time) {
        std::cerr << "t-end must be >= the snapshot time\n";
        return kPlanFail;
    }
    std::filesystem::create_directories(opts.out_dir);
    const auto out = [&](const std::string &name) {
        return (std::filesystem::path(opts.out_dir) / name).string();
    };
    std::ostringstream extra;
    extra << "input=" << input << " t_end=" << format_double(t_end);
    const std::string comment = config_comment("simulate", opts, extra.str());
    try {
        EnsembleStepper stepper(std::move(e), opts.stepper);
        TimeSeriesRecorder recorder;
        stepper.add_observer([&](double t, const Ensemble &en, const MassProfile &p) {
            recorder.observe(t, en, p);
        });
        stepper.advance_to(t_end);
        write_series_csv(out("series.csv"), recorder.series(), comment);
        write_ensemble_csv(out("final.csv"), stepper.ensemble(), comment);
        return kOk;
    } catch (const std::exception &ex) {
        std::cerr << "integration failure: " << ex.what() << "\n";
        return kIntegrateFail;
    }
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Radial relativistic Vlasov-Poisson shell simulator"};
    app.set_version_flag("--version", kVersion);
    app.set_config("--config", "", "plain-text key=value configuration file");
    app.require_subcommand(1);

    // scenario
    auto *scenario = app.add_subcommand("scenario", "plan and run a concentration scenario");
    scenario->require_subcommand(1);
    double c1 = 0, c2 = 0, time = 0;
    std::optional<double> epsilon;
    CommonOpts sopts;
    auto *t1 = scenario->add_subcommand("theorem1", "small-data concentration run");
    t1->add_option("--c1", c1, "initial density/field bound")->required();
    t1->add_option("--c2", c2, "target density/field at time T")->required();
    t1->add_option("--epsilon", epsilon, "force the concentration parameter");
    add_common(t1, sopts);
    auto *t2 = scenario->add_subcommand("theorem2", "fixed-mass concentration run");
    t2->add_option("--c1", c1, "total mass")->required();
    t2->add_option("--c2", c2, "target density/field at time T")->required();
    t2->add_option("--time", time, "concentration time T")->required();
    t2->add_option("--epsilon", epsilon, "force the concentration parameter");
    add_common(t2, sopts);

    // check-bounds
    auto *cb = app.add_subcommand("check-bounds", "single-characteristic turning-point check");
    double r = 0, w = 0, l = 0, mass = 0;
    std::optional<double> mu;
    CommonOpts copts;
    cb->add_option("--r", r, "initial radius")->required();
    cb->add_option("--w", w, "initial radial momentum (negative)")->required();
    cb->add_option("--l", l, "squared angular momentum")->required();
    cb->add_option("--mass", mass, "total-mass bound M")->required();
    cb->add_option("--mu", mu, "constant enclosed mass (default 0)");
    add_common(cb, copts);

    // simulate
    auto *sim = app.add_subcommand("simulate", "run a self-consistent ensemble from CSV");
    std::string input;
    double t_end = 0;
    CommonOpts mopts;
    sim->add_option("--input", input, "ensemble CSV")->required();
    sim->add_option("--t-end", t_end, "end time")->required();
    add_common(sim, mopts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        std::cerr << e.what() << "\n";
        return kUsage;
    }

    if (t1->parsed())
        return run_scenario_cmd("theorem1", c1, c2, time, epsilon, sopts);
    if (t2->parsed())
        return run_scenario_cmd("theorem2", c1, c2, time, epsilon, sopts);
    if (cb->parsed())
        return run_check_bounds(r, w, l, mass, mu, copts);
    if (sim->parsed())
        return run_simulate(input, t_end, mopts);
    return kUsage;
}
