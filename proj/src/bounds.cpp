#include "vpshell/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vpshell {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kT0Neighborhood = 1e-8; // part-1 strictness exclusion window

double part_scale(double v) { return std::max(1.0, std::abs(v)); }
} // namespace

Lemma1Quantities lemma1_quantities(double r, double w, double l, double M)
{
    if (r <= 0.0 || w >= 0.0 || l < 0.0 || M < 0.0)
        throw std::domain_error("lemma1_quantities: need r > 0, w < 0, l >= 0, M >= 0");
    Lemma1Quantities q;
    const double g = std::sqrt(1.0 + w * w + l / (r * r));
    const double rw2 = r * r * w * w;
    q.D = l + M * r * g;
    q.R_minus = l == 0.0 ? 0.0 : r * std::sqrt(l / (rw2 + l));
    q.R_plus = q.D == 0.0 ? 0.0 : r * std::sqrt(q.D / (rw2 + q.D));
    q.T0_lower = r * (1.0 - (q.D == 0.0 ? 0.0 : std::sqrt(q.D / (rw2 + q.D))));
    if (l > 0.0)
        q.T0_upper = -w * r * r * r * g / l;
    q.t_min = r * std::abs(w) * g / (w * w + q.D / (r * r));
    return q;
}

double energy_upper_envelope(double r, double w, double l, double M, double t)
{
    if (t < 0.0)
        throw std::domain_error("energy_upper_envelope: t must be nonnegative");
    const Lemma1Quantities q = lemma1_quantities(r, w, l, M);
    const double g2 = 1.0 + w * w + l / (r * r);
    const double a = r - std::abs(w) / std::sqrt(g2) * t;
    return a * a + q.D / (r * r * g2) * t * t;
}

Lemma3Bounds lemma3_bounds(double M, double B)
{
    if (M <= 0.0 || B <= 0.0)
        throw std::domain_error("lemma3_bounds: M and B must be positive");
    return {3.0 * M / (4.0 * kPi * B * B * B), M / (B * B)};
}

Lemma1CheckEntry check_lemma1(const std::vector<double> &t, const std::vector<double> &R,
                              const std::vector<double> &W, double r, double w, double l,
                              double M, const TurningEvent &event, double slack)
{
    const Lemma1Quantities q = lemma1_quantities(r, w, l, M);
    const double T0 = event.T0;
    const double ee0 = w * w + l / (r * r);
    const double g2 = 1.0 + ee0;
    const double vterm = std::abs(w) / std::sqrt(g2);
    const double Dterm = q.D / (r * r * g2);

    Lemma1CheckEntry e;
    e.detected_T0 = T0;

    double m1 = -1e300, m4 = -1e300, m5 = -1e300;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < T0 - kT0Neighborhood) {
            m1 = std::max(m1, W[i]); // must be < 0
        } else if (t[i] > T0 + kT0Neighborhood) {
            m1 = std::max(m1, -W[i]); // must be > 0
        }
        if (t[i] <= T0) {
            m4 = std::max(m4, W[i] * W[i] + l / (R[i] * R[i]) - ee0);
            const double a = r - vterm * t[i];
            m5 = std::max(m5, R[i] * R[i] - (a * a + Dterm * t[i] * t[i]));
        }
    }
    e.margin[0] = m1 / part_scale(w);
    e.margin[1] = std::max(q.T0_lower - T0,
                           q.T0_upper ? T0 - *q.T0_upper : -1e300) /
                  part_scale(T0);
    e.margin[2] = std::max(q.R_minus - event.R_at_T0, event.R_at_T0 - q.R_plus) /
                  part_scale(r);
    e.margin[3] = m4 / part_scale(ee0);
    e.margin[4] = m5 / part_scale(r * r);

    e.all_pass = true;
    for (int k = 0; k < 5; ++k) {
        e.pass[k] = e.margin[k] <= slack;
        e.all_pass = e.all_pass && e.pass[k];
    }
    return e;
}

bool LemmaReport::all_pass() const
{
    if (particles_without_event > 0)
        return false;
    for (int k = 0; k < 5; ++k)
        if (fail_count[k] > 0)
            return false;
    return true;
}

LemmaChecker::LemmaChecker(const Ensemble &initial, double M, double slack, bool verbose)
    : M_(M), slack_(slack), verbose_(verbose)
{
    per_.reserve(initial.size());
    for (const auto &p : initial.particles) {
        PerParticle pp;
        pp.r = p.R;
        pp.w = p.W;
        pp.l = p.L;
        pp.q = lemma1_quantities(p.R, p.W, p.L, M);
        per_.push_back(pp);
    }
}

void LemmaChecker::observe(double t, const Ensemble &e)
{
    const long n = static_cast<long>(per_.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
        PerParticle &pp = per_[static_cast<std::size_t>(i)];
        const auto &p = e.particles[static_cast<std::size_t>(i)];
        if (!pp.crossed) {
            if (p.W >= 0.0) {
                pp.crossed = true;
                pp.cross_time = t;
                // W >= 0 here by definition; no part-1 violation possible
            } else {
                const double ee0 = pp.w * pp.w + pp.l / (pp.r * pp.r);
                pp.worst_energy = std::max(
                    pp.worst_energy, p.W * p.W + pp.l / (p.R * p.R) - ee0);
                const double g2 = 1.0 + ee0;
                const double a = pp.r - std::abs(pp.w) / std::sqrt(g2) * t;
                const double env = a * a + pp.q.D / (pp.r * pp.r * g2) * t * t;
                pp.worst_envelope = std::max(pp.worst_envelope, p.R * p.R - env);
            }
        } else {
            // uniqueness and positivity after the turning
            pp.worst_negW_after = std::max(pp.worst_negW_after, -p.W);
        }
    }
}

LemmaReport LemmaChecker::finalize(const std::vector<std::optional<TurningEvent>> &events) const
{
    LemmaReport rep;
    rep.slack = slack_;
    for (int k = 0; k < 5; ++k)
        rep.worst_margin[k] = -1e300;

    for (std::size_t i = 0; i < per_.size(); ++i) {
        const PerParticle &pp = per_[i];
        if (!events[i]) {
            ++rep.particles_without_event;
            continue;
        }
        const TurningEvent &ev = *events[i];
        Lemma1CheckEntry e;
        e.index = i;
        e.detected_T0 = ev.T0;
        e.margin[0] =
            std::max(pp.worst_W_before, pp.worst_negW_after) / part_scale(pp.w);
        e.margin[1] = std::max(pp.q.T0_lower - ev.T0,
                               pp.q.T0_upper ? ev.T0 - *pp.q.T0_upper : -1e300) /
                      part_scale(ev.T0);
        e.margin[2] =
            std::max(pp.q.R_minus - ev.R_at_T0, ev.R_at_T0 - pp.q.R_plus) /
            part_scale(pp.r);
        const double ee0 = pp.w * pp.w + pp.l / (pp.r * pp.r);
        e.margin[3] = pp.worst_energy / part_scale(ee0);
        e.margin[4] = pp.worst_envelope / part_scale(pp.r * pp.r);

        e.all_pass = true;
        for (int k = 0; k < 5; ++k) {
            e.pass[k] = e.margin[k] <= slack_;
            e.all_pass = e.all_pass && e.pass[k];
            if (e.pass[k])
                ++rep.pass_count[k];
            else
                ++rep.fail_count[k];
            rep.worst_margin[k] = std::max(rep.worst_margin[k], e.margin[k]);
        }
        ++rep.particles_checked;
        if (verbose_)
            rep.entries.push_back(e);
    }
    return rep;
}

} // namespace vpshell
