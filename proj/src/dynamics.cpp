#include "vpshell/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace vpshell {

namespace {

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// difference between 5th and 4th order weights
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

constexpr double kOriginFloor = 1e-9; // freeze radius for l = 0 divers
constexpr double kEventTol = 1e-9;    // absolute tolerance on T0

struct StepOut {
    double R1, W1;   // 5th order solution
    double eR, eW;   // embedded error estimate
    double k1R, k1W; // derivative at the start
    double k7R, k7W; // derivative at the end
    bool valid;
};

// One DP54 step for a single characteristic with frozen enclosed mass.
StepOut dp54_step(double R0, double W0, double L, double mu, double dt)
{
    StepOut o{};
    double kR[7], kW[7];
    auto eval = [&](double R, double W, int i) -> bool {
        if (R <= 0.0)
            return false;
        const double g = std::sqrt(1.0 + W * W + L / (R * R));
        kR[i] = W / g;
        kW[i] = L / (R * R * R * g) + mu / (R * R);
        return true;
    };
    if (!eval(R0, W0, 0))
        return o;
    double R = R0 + dt * a21 * kR[0];
    double W = W0 + dt * a21 * kW[0];
    if (!eval(R, W, 1))
        return o;
    R = R0 + dt * (a31 * kR[0] + a32 * kR[1]);
    W = W0 + dt * (a31 * kW[0] + a32 * kW[1]);
    if (!eval(R, W, 2))
        return o;
    R = R0 + dt * (a41 * kR[0] + a42 * kR[1] + a43 * kR[2]);
    W = W0 + dt * (a41 * kW[0] + a42 * kW[1] + a43 * kW[2]);
    if (!eval(R, W, 3))
        return o;
    R = R0 + dt * (a51 * kR[0] + a52 * kR[1] + a53 * kR[2] + a54 * kR[3]);
    W = W0 + dt * (a51 * kW[0] + a52 * kW[1] + a53 * kW[2] + a54 * kW[3]);
    if (!eval(R, W, 4))
        return o;
    R = R0 + dt * (a61 * kR[0] + a62 * kR[1] + a63 * kR[2] + a64 * kR[3] + a65 * kR[4]);
    W = W0 + dt * (a61 * kW[0] + a62 * kW[1] + a63 * kW[2] + a64 * kW[3] + a65 * kW[4]);
    if (!eval(R, W, 5))
        return o;
    const double R1 = R0 + dt * (b1 * kR[0] + b3 * kR[2] + b4 * kR[3] + b5 * kR[4] + b6 * kR[5]);
    const double W1 = W0 + dt * (b1 * kW[0] + b3 * kW[2] + b4 * kW[3] + b5 * kW[4] + b6 * kW[5]);
    if (!eval(R1, W1, 6))
        return o;
    o.R1 = R1;
    o.W1 = W1;
    o.eR = dt * (e1 * kR[0] + e3 * kR[2] + e4 * kR[3] + e5 * kR[4] + e6 * kR[5] + e7 * kR[6]);
    o.eW = dt * (e1 * kW[0] + e3 * kW[2] + e4 * kW[3] + e5 * kW[4] + e6 * kW[5] + e7 * kW[6]);
    o.k1R = kR[0];
    o.k1W = kW[0];
    o.k7R = kR[6];
    o.k7W = kW[6];
    o.valid = true;
    return o;
}

double error_norm(const StepOut &o, double R0, double W0, double rel, double abs)
{
    const double scR = abs + rel * std::max(std::abs(R0), std::abs(o.R1));
    const double scW = abs + rel * std::max(std::abs(W0), std::abs(o.W1));
    const double a = o.eR / scR;
    const double b = o.eW / scW;
    return std::sqrt(0.5 * (a * a + b * b));
}

double hermite(double y0, double d0, double y1, double d1, double dt, double th)
{
    const double h00 = (1 + 2 * th) * (1 - th) * (1 - th);
    const double h10 = th * (1 - th) * (1 - th);
    const double h01 = th * th * (3 - 2 * th);
    const double h11 = th * th * (th - 1);
    return h00 * y0 + h10 * dt * d0 + h01 * y1 + h11 * dt * d1;
}

// Locate the zero of W on [t0, t0+dt] by bisection on the cubic dense
// output. W(t0) < 0 <= W(t0+dt).
void refine_turning(double t0, double dt, double R0, double W0, double k1R, double k1W,
                    double R1, double W1, double k7R, double k7W, double &T0, double &R_T0)
{
    double lo = 0.0, hi = 1.0;
    while ((hi - lo) * dt > kEventTol) {
        const double mid = 0.5 * (lo + hi);
        if (hermite(W0, k1W, W1, k7W, dt, mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    const double th = 0.5 * (lo + hi);
    T0 = t0 + th * dt;
    R_T0 = hermite(R0, k1R, R1, k7R, dt, th);
}

} // namespace

void rhs(double R, double W, double L, double m_enclosed, double &dR, double &dW)
{
    if (R <= 0.0)
        throw std::domain_error("rhs: R must be positive");
    const double g = std::sqrt(1.0 + W * W + L / (R * R));
    dR = W / g;
    dW = L / (R * R * R * g) + m_enclosed / (R * R);
}

SingleResult integrate_characteristic(double r, double w, double l, double mu,
                                      double t_end, const StepperConfig &cfg,
                                      bool stop_after_turn)
{
    if (r <= 0.0 || l < 0.0 || mu < 0.0)
        throw std::domain_error("integrate_characteristic: bad initial state");
    SingleResult res;
    double t = 0.0, R = r, W = w;
    res.t.push_back(t);
    res.R.push_back(R);
    res.W.push_back(W);

    double dt = std::clamp(cfg.dt_init, cfg.dt_min, cfg.dt_max);
    while (t < t_end) {
        const double sp = speed(R, W, l);
        if (sp > 0.0)
            dt = std::min(dt, 0.1 * R / sp);
        dt = std::min(dt, t_end - t);

        StepOut o = dp54_step(R, W, l, mu, dt);
        double err = o.valid ? error_norm(o, R, W, cfg.rel_tol, cfg.abs_tol)
                             : std::numeric_limits<double>::infinity();
        if (err > 1.0) {
            const double f = std::isfinite(err)
                                 ? std::max(0.2, cfg.safety * std::pow(err, -0.2))
                                 : 0.2;
            dt *= f;
            if (dt < cfg.dt_min) {
                if (l == 0.0) {
                    // radial free fall into the origin: freeze and report the
                    // straight-line crossing time
                    res.frozen = true;
                    res.origin_crossing_time = t + R * kinetic_energy(R, W, 0.0) / std::abs(W);
                    return res;
                }
                throw std::runtime_error("integrate_characteristic: step size underflow");
            }
            continue;
        }

        if (!res.event && W < 0.0 && o.W1 >= 0.0) {
            double T0, R_T0;
            refine_turning(t, dt, R, W, o.k1R, o.k1W, o.R1, o.W1, o.k7R, o.k7W, T0, R_T0);
            res.event = TurningEvent{0, T0, R_T0};
        }
        t += dt;
        R = o.R1;
        W = o.W1;
        res.t.push_back(t);
        res.R.push_back(R);
        res.W.push_back(W);

        if (l == 0.0 && R < kOriginFloor && W < 0.0) {
            res.frozen = true;
            res.origin_crossing_time = t + R * kinetic_energy(R, W, 0.0) / std::abs(W);
            return res;
        }
        if (stop_after_turn && res.event && t > res.event->T0 + 10.0 * kEventTol)
            return res;

        dt = std::min({dt * std::min(5.0, std::max(0.2, cfg.safety * std::pow(std::max(err, 1e-16), -0.2))),
                       cfg.dt_max});
        dt = std::max(dt, cfg.dt_min);
    }
    return res;
}

EnsembleStepper::EnsembleStepper(Ensemble initial, StepperConfig cfg)
    : state_(std::move(initial)), cfg_(cfg)
{
    const std::size_t n = state_.size();
    for (const auto &p : state_.particles)
        if (p.R <= 0.0 || p.L < 0.0 || p.weight <= 0.0)
            throw std::domain_error("EnsembleStepper: invalid particle state");
    profile_ = MassProfile::build(state_);
    events_.resize(n);
    frozen_.assign(n, 0);
    mu_.resize(n);
    newR_.resize(n);
    newW_.resize(n);
    k1R_.resize(n);
    k1W_.resize(n);
    k7R_.resize(n);
    k7W_.resize(n);
    errs_.resize(n);
    dt_ = std::clamp(cfg_.dt_init, cfg_.dt_min, cfg_.dt_max);
    const double cap = geometric_cap();
    if (cap > 0.0)
        dt_ = std::min(dt_, cap);
}

double EnsembleStepper::geometric_cap() const
{
    // dt <= 0.1 min_i (R_i / speed_i), serial index-ordered reduction
    double cap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < state_.size(); ++i) {
        if (frozen_[i])
            continue;
        const auto &p = state_.particles[i];
        const double sp = speed(p);
        if (sp > 0.0)
            cap = std::min(cap, 0.1 * p.R / sp);
    }
    return std::isfinite(cap) ? cap : 0.0;
}

bool EnsembleStepper::attempt_step(double dt, double &err)
{
    const long n = static_cast<long>(state_.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        if (frozen_[idx]) {
            newR_[idx] = state_.particles[idx].R;
            newW_[idx] = state_.particles[idx].W;
            errs_[idx] = 0.0;
            continue;
        }
        const auto &p = state_.particles[idx];
        const StepOut o = dp54_step(p.R, p.W, p.L, mu_[idx], dt);
        if (!o.valid) {
            errs_[idx] = std::numeric_limits<double>::infinity();
            continue;
        }
        newR_[idx] = o.R1;
        newW_[idx] = o.W1;
        k1R_[idx] = o.k1R;
        k1W_[idx] = o.k1W;
        k7R_[idx] = o.k7R;
        k7W_[idx] = o.k7W;
        errs_[idx] = error_norm(o, p.R, p.W, cfg_.rel_tol, cfg_.abs_tol);
    }
    err = 0.0;
    for (long i = 0; i < n; ++i)
        err = std::max(err, errs_[static_cast<std::size_t>(i)]);
    return err <= 1.0;
}

void EnsembleStepper::freeze_midpoint_field(double dt)
{
    // one profile per step, held fixed across all stages; it is evaluated on
    // a half-step predictor so the splitting error is second order in dt
    const long n = static_cast<long>(state_.size());
    proposal_.particles = state_.particles;
    proposal_.total_mass = state_.total_mass;
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        if (frozen_[idx])
            continue;
        const auto &p = state_.particles[idx];
        double dR, dW;
        rhs(p.R, p.W, p.L, profile_.enclosed_mass_at_particle(idx), dR, dW);
        const double Rh = p.R + 0.5 * dt * dR;
        auto &q = proposal_.particles[idx];
        if (Rh > 0.0) {
            q.R = Rh;
            q.W = p.W + 0.5 * dt * dW;
        }
    }
    const MassProfile mid = MassProfile::build(proposal_);
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i)
        mu_[static_cast<std::size_t>(i)] =
            mid.enclosed_mass_at_particle(static_cast<std::size_t>(i));
}

double EnsembleStepper::proposed_mass_shift()
{
    // build the profile of the proposed state and report the largest change
    // of any particle's enclosed mass relative to the frozen value
    proposal_.particles = state_.particles;
    proposal_.total_mass = state_.total_mass;
    for (std::size_t i = 0; i < proposal_.size(); ++i) {
        if (frozen_[i])
            continue;
        proposal_.particles[i].R = newR_[i];
        proposal_.particles[i].W = newW_[i];
    }
    proposal_profile_ = MassProfile::build(proposal_);
    double shift = 0.0;
    for (std::size_t i = 0; i < state_.size(); ++i) {
        if (frozen_[i])
            continue;
        shift = std::max(shift,
                         std::abs(proposal_profile_.enclosed_mass_at_particle(i) - mu_[i]));
    }
    return shift;
}

void EnsembleStepper::accept_step(double dt)
{
    const double t0 = state_.time;
    for (std::size_t i = 0; i < state_.size(); ++i) {
        if (frozen_[i])
            continue;
        auto &p = state_.particles[i];
        if (!events_[i] && p.W < 0.0 && newW_[i] >= 0.0) {
            double T0, R_T0;
            refine_turning(t0, dt, p.R, p.W, k1R_[i], k1W_[i], newR_[i], newW_[i], k7R_[i],
                           k7W_[i], T0, R_T0);
            events_[i] = TurningEvent{i, T0, R_T0};
        }
        p.R = newR_[i];
        p.W = newW_[i];
        if (p.L == 0.0 && p.R < kOriginFloor && p.W < 0.0)
            frozen_[i] = 1;
    }
    state_.time = t0 + dt;
    profile_ = std::move(proposal_profile_); // built by proposed_mass_shift
    ++accepted_;
}

void EnsembleStepper::notify()
{
    for (auto &obs : observers_)
        obs(state_.time, state_, profile_);
}

void EnsembleStepper::advance_to(double t_end)
{
    if (t_end < state_.time)
        throw std::invalid_argument("advance_to: t_end before current time");
    while (state_.time < t_end) {
        double dt = dt_;
        const double cap = geometric_cap();
        if (cap > 0.0)
            dt = std::min(dt, cap);
        dt = std::max(dt, cfg_.dt_min);
        const bool clipped = state_.time + dt >= t_end;
        if (clipped)
            dt = t_end - state_.time;

        double err;
        for (;;) {
            freeze_midpoint_field(dt);
            if (!attempt_step(dt, err)) {
                ++rejected_;
                const double f = std::isfinite(err)
                                     ? std::max(0.2, cfg_.safety * std::pow(err, -0.2))
                                     : 0.2;
                dt *= f;
                if (dt < cfg_.dt_min)
                    throw std::runtime_error("EnsembleStepper: step size underflow");
                continue;
            }
            // splitting control: the frozen enclosed mass must stay close to
            // the enclosed mass of the proposed state
            const double shift = proposed_mass_shift();
            if (shift > cfg_.mass_step_frac * state_.total_mass && dt > 2.0 * cfg_.dt_min) {
                ++rejected_;
                dt *= 0.5;
                continue;
            }
            break;
        }
        accept_step(dt);
        // next proposal from the accepted step's error
        dt_ = std::min(dt * std::min(5.0, std::max(0.2, cfg_.safety *
                                                            std::pow(std::max(err, 1e-16), -0.2))),
                       cfg_.dt_max);
        dt_ = std::max(dt_, cfg_.dt_min);
        notify();
    }
}

bool EnsembleStepper::all_turned() const
{
    for (std::size_t i = 0; i < state_.size(); ++i)
        if (!events_[i] && !frozen_[i])
            return false;
    return true;
}

bool EnsembleStepper::run_until_all_turned(double t_cap)
{
    while (!all_turned() && state_.time < t_cap) {
        const double target = std::min(t_cap, state_.time + std::max(10.0 * dt_, 1e-6));
        advance_to(target);
    }
    return all_turned();
}

} // namespace vpshell
