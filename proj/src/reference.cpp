#include "vpshell/reference.hpp"

#include <cmath>
#include <stdexcept>

#include "vpshell/bounds.hpp"
#include "vpshell/core.hpp"

namespace vpshell::reference {

double free_streaming_radius(double r, double w, double l, double t)
{
    const double g2 = 1.0 + w * w + l / (r * r);
    const double s2 =
        r * r + 2.0 * r * (w / std::sqrt(g2)) * t + ((w * w + l / (r * r)) / g2) * t * t;
    return std::sqrt(s2);
}

namespace {
void deriv(double R, double W, double l, double mu, double &dR, double &dW)
{
    const double g = std::sqrt(1.0 + W * W + l / (R * R));
    dR = W / g;
    dW = l / (R * R * R * g) + mu / (R * R);
}
} // namespace

Trajectory integrate_rk4(double r, double w, double l, double mu, double t_end, double dt)
{
    if (r <= 0.0 || l < 0.0 || mu < 0.0 || dt <= 0.0)
        throw std::domain_error("integrate_rk4: bad arguments");
    Trajectory tr;
    double t = 0.0, R = r, W = w;
    tr.t.push_back(t);
    tr.R.push_back(R);
    tr.W.push_back(W);
    const long n_steps = static_cast<long>(std::ceil(t_end / dt));
    for (long s = 0; s < n_steps; ++s) {
        const double h = std::min(dt, t_end - t);
        double k1R, k1W, k2R, k2W, k3R, k3W, k4R, k4W;
        deriv(R, W, l, mu, k1R, k1W);
        deriv(R + 0.5 * h * k1R, W + 0.5 * h * k1W, l, mu, k2R, k2W);
        deriv(R + 0.5 * h * k2R, W + 0.5 * h * k2W, l, mu, k3R, k3W);
        deriv(R + h * k3R, W + h * k3W, l, mu, k4R, k4W);
        const double R1 = R + h / 6.0 * (k1R + 2 * k2R + 2 * k3R + k4R);
        const double W1 = W + h / 6.0 * (k1W + 2 * k2W + 2 * k3W + k4W);
        if (!tr.event && W < 0.0 && W1 >= 0.0) {
            // local cubic through endpoint values and derivatives
            double d1R, d1W;
            deriv(R1, W1, l, mu, d1R, d1W);
            double lo = 0.0, hi = 1.0;
            auto cubic = [&](double th) {
                const double h00 = (1 + 2 * th) * (1 - th) * (1 - th);
                const double h10 = th * (1 - th) * (1 - th);
                const double h01 = th * th * (3 - 2 * th);
                const double h11 = th * th * (th - 1);
                return h00 * W + h10 * h * k1W + h01 * W1 + h11 * h * d1W;
            };
            while ((hi - lo) * h > 1e-12) {
                const double mid = 0.5 * (lo + hi);
                (cubic(mid) < 0.0 ? lo : hi) = mid;
            }
            const double th = 0.5 * (lo + hi);
            const double h00 = (1 + 2 * th) * (1 - th) * (1 - th);
            const double h10 = th * (1 - th) * (1 - th);
            const double h01 = th * th * (3 - 2 * th);
            const double h11 = th * th * (th - 1);
            const double R_T0 = h00 * R + h10 * h * k1R + h01 * R1 + h11 * h * d1R;
            tr.event = TurningEvent{0, t + th * h, R_T0};
        }
        t += h;
        R = R1;
        W = W1;
        tr.t.push_back(t);
        tr.R.push_back(R);
        tr.W.push_back(W);
    }
    return tr;
}

Trajectory integrate_until_turned(double r, double w, double l, double mu, double M,
                                  int steps_per_tmin)
{
    const Lemma1Quantities q = lemma1_quantities(r, w, l, M);
    const double dt = q.t_min / steps_per_tmin;
    // t_min bounds T0 from the same parabola; integrate past it with margin
    double horizon = 2.0 * q.t_min;
    for (int grow = 0; grow < 8; ++grow) {
        Trajectory tr = integrate_rk4(r, w, l, mu, horizon, dt);
        if (tr.event && tr.t.back() > tr.event->T0 * 1.05)
            return tr;
        horizon *= 2.0;
    }
    throw std::runtime_error("integrate_until_turned: no turning before horizon");
}

} // namespace vpshell::reference
