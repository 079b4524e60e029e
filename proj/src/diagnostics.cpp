#include "vpshell/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vpshell {

namespace {
constexpr double kPi = 3.14159265358979323846;

double ball_mass(const Ensemble &e, double B)
{
    double m = 0.0;
    for (const auto &p : e.particles)
        if (p.R <= B)
            m += p.weight;
    return m;
}

double weighted_gamma_sum(const Ensemble &e)
{
    double s = 0.0;
    for (const auto &p : e.particles)
        s += p.weight * kinetic_energy(p);
    return s;
}
} // namespace

double density_ball_average(const Ensemble &e, double B)
{
    if (B <= 0.0)
        throw std::domain_error("density_ball_average: B must be positive");
    return ball_mass(e, B) / (4.0 / 3.0 * kPi * B * B * B);
}

double sup_rho_estimate(const Ensemble &e, const MassProfile &profile)
{
    if (e.size() == 0)
        throw std::domain_error("sup_rho_estimate: empty ensemble");
    const std::size_t n = e.size();
    const double r_min = profile.min_radius();
    const double r_max = profile.max_radius();

    double best = 0.0;

    const std::size_t K =
        std::max<std::size_t>(16, static_cast<std::size_t>(std::ceil(std::sqrt(double(n)))));
    const double width = (r_max - r_min) / double(K);
    if (width > 0.0) {
        std::vector<double> shell_mass(K, 0.0);
        for (const auto &p : e.particles) {
            auto k = static_cast<std::size_t>((p.R - r_min) / width);
            shell_mass[std::min(k, K - 1)] += p.weight;
        }
        for (std::size_t k = 0; k < K; ++k) {
            const double ri = r_min + k * width;
            const double ro = ri + width;
            const double vol = 4.0 / 3.0 * kPi * (ro * ro * ro - ri * ri * ri);
            if (vol > 0.0)
                best = std::max(best, shell_mass[k] / vol);
        }
    }

    const double r_median = profile.sorted_radii()[n / 2];
    for (double B : {r_max, 2.0 * r_max, r_median})
        if (B > 0.0)
            best = std::max(best, density_ball_average(e, B));
    return best;
}

double sup_rho_estimate(const Ensemble &e)
{
    return sup_rho_estimate(e, MassProfile::build(e));
}

double interaction_energy(const Ensemble &e, const MassProfile &profile)
{
    double s = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i)
        s += e.particles[i].weight * profile.enclosed_mass_at_particle(i) /
             e.particles[i].R;
    return s;
}

DecayFit decay_fit(const TimeSeries &series, double t_start, double t_end)
{
    double sx = 0, sxx = 0, sy1 = 0, sxy1 = 0, sy2 = 0, sxy2 = 0;
    long n = 0;
    for (const auto &row : series.rows) {
        if (row.t < t_start || row.t > t_end || row.t <= 0.0)
            continue;
        if (row.sup_rho <= 0.0 || row.sup_field <= 0.0)
            continue;
        const double x = std::log(row.t);
        const double y1 = std::log(row.sup_rho);
        const double y2 = std::log(row.sup_field);
        sx += x;
        sxx += x * x;
        sy1 += y1;
        sxy1 += x * y1;
        sy2 += y2;
        sxy2 += x * y2;
        ++n;
    }
    if (n < 10)
        throw std::runtime_error("decay_fit: fewer than 10 usable rows in window");
    const double det = n * sxx - sx * sx;
    if (det == 0.0)
        throw std::runtime_error("decay_fit: degenerate time window");
    return {(n * sxy1 - sx * sy1) / det, (n * sxy2 - sx * sy2) / det};
}

void TimeSeriesRecorder::observe(double t, const Ensemble &e, const MassProfile &profile)
{
    TimeSeriesRow row;
    row.t = t;
    row.sup_rho = sup_rho_estimate(e, profile);
    row.sup_field = profile.sup_field();
    row.r_min = profile.min_radius();
    row.r_max = profile.max_radius();
    row.kinetic = weighted_gamma_sum(e);
    row.field_energy = profile.field_energy();
    row.total_energy = row.kinetic + row.field_energy;
    series_.rows.push_back(row);
}

ConservationMonitor::ConservationMonitor(const Ensemble &initial)
{
    mass0_ = initial.total_mass;
    L0_.reserve(initial.size());
    w0_.reserve(initial.size());
    prev_gamma_.reserve(initial.size());
    prev_W_.reserve(initial.size());
    for (const auto &p : initial.particles) {
        L0_.push_back(p.L);
        w0_.push_back(p.weight);
        prev_gamma_.push_back(kinetic_energy(p));
        prev_W_.push_back(p.W);
    }
    energy0_ = weighted_gamma_sum(initial) +
               interaction_energy(initial, MassProfile::build(initial));
    have_energy0_ = true;
}

void ConservationMonitor::observe(double, const Ensemble &e, const MassProfile &profile)
{
    if (sum_weights(e) != mass0_ || e.total_mass != mass0_)
        mass_ok_ = false;
    for (std::size_t i = 0; i < e.size(); ++i) {
        const auto &p = e.particles[i];
        if (p.L != L0_[i] || p.weight != w0_[i])
            l_ok_ = false;
        if (speed(p) >= 1.0)
            speed_ok_ = false;
        const double g = kinetic_energy(p);
        if (prev_W_[i] <= 0.0 && p.W <= 0.0)
            max_gamma_rise_ = std::max(max_gamma_rise_, g - prev_gamma_[i]);
        prev_gamma_[i] = g;
        prev_W_[i] = p.W;
    }
    // conserved total: kinetic plus pairwise interaction energy; the
    // step-function field_energy adds a per-particle self-energy that spikes
    // at deep compression and vanishes only with particle-count refinement
    const double total = weighted_gamma_sum(e) + interaction_energy(e, profile);
    max_drift_ = std::max(max_drift_, std::abs(total - energy0_) / std::abs(energy0_));
}

} // namespace vpshell
