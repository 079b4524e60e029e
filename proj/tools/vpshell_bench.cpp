#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "vpshell/bounds.hpp"
#include "vpshell/dynamics.hpp"
#include "vpshell/initial_data.hpp"
#include "vpshell/reference.hpp"

namespace {

double now_seconds()
{
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

struct RunResult {
    double seconds;
    double checksum; // index-ordered sum of final R and W
    long accepted;
};

RunResult run_ensemble(const vpshell::Ensemble &initial, double t_end, int threads)
{
#ifdef _OPENMP
    omp_set_num_threads(threads);
#else
    (void)threads;
#endif
    vpshell::EnsembleStepper stepper(initial, vpshell::StepperConfig{});
    const double t0 = now_seconds();
    stepper.advance_to(t_end);
    const double t1 = now_seconds();
    double sum = 0.0;
    for (const auto &p : stepper.ensemble().particles)
        sum += p.R + p.W;
    return {t1 - t0, sum, stepper.accepted_steps()};
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Benchmark: parallel adaptive stepper vs serial reference integrator"};
    int Nr = 48, Nw = 96, Nl = 48;
    double frac = 0.5; // fraction of the free-fall time to integrate
    app.add_option("--nr", Nr, "radial grid cells");
    app.add_option("--nw", Nw, "momentum grid cells");
    app.add_option("--nl", Nl, "angular-momentum grid cells");
    app.add_option("--frac", frac, "fraction of the collapse time to run");
    CLI11_PARSE(app, argc, argv);

    using namespace vpshell;
    const ShellDataSpec spec{1.0, 0.05, std::nullopt};
    const SamplingGrid grid = SamplingGrid::for_spec(spec, Nr, Nw, Nl);
    const Ensemble initial = sample(spec, grid);
    const double t_end = frac * spec.a0;

    std::printf("particles: %zu  t_end: %.4f\n", initial.size(), t_end);

    int max_threads = 1;
#ifdef _OPENMP
    // oversubscribe on single-core hosts so the bit-equality comparison
    // across thread counts still runs
    max_threads = std::max(omp_get_max_threads(), 4);
#endif

    const RunResult serial = run_ensemble(initial, t_end, 1);
    std::printf("ensemble  threads=1   %8.3f s  steps=%ld  checksum=%.17g\n",
                serial.seconds, serial.accepted, serial.checksum);
    if (max_threads > 1) {
        const RunResult parallel = run_ensemble(initial, t_end, max_threads);
        std::printf("ensemble  threads=%-3d %8.3f s  steps=%ld  checksum=%.17g\n",
                    max_threads, parallel.seconds, parallel.accepted, parallel.checksum);
        std::printf("speedup: %.2fx  checksums %s\n", serial.seconds / parallel.seconds,
                    parallel.checksum == serial.checksum ? "identical" : "DIFFER");
        if (parallel.checksum != serial.checksum)
            return 1;
    }

    // single-characteristic comparison: adaptive embedded pair vs the
    // fixed-step reference integrator, matched on the same trajectory
    const double r = spec.a0, w = -1.0, l = 1e-4, mu = 0.0;
    const double horizon = 3.0 * lemma1_quantities(r, w, l, mu).t_min;
    double t0 = now_seconds();
    SingleResult adaptive =
        integrate_characteristic(r, w, l, mu, horizon, StepperConfig{}, true);
    double t1 = now_seconds();
    reference::Trajectory ref = reference::integrate_until_turned(r, w, l, mu, 0.0);
    double t2 = now_seconds();
    std::printf("single characteristic: adaptive %.4f s (%zu samples), "
                "reference %.4f s (%zu samples)\n",
                t1 - t0, adaptive.t.size(), t2 - t1, ref.t.size());
    if (adaptive.event && ref.event)
        std::printf("turning times agree to %.3e\n",
                    std::abs(adaptive.event->T0 - ref.event->T0));
    return 0;
}
