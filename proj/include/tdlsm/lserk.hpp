#ifndef TDLSM_LSERK_HPP
#define TDLSM_LSERK_HPP

#include "tdlsm/dg.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace tdlsm {

/// Five-stage fourth-order low-storage explicit Runge-Kutta tableau
/// (single residual register).
struct TimeIntegrator {
    std::array<double, 5> a = {
        0.0,
        -567301805773.0 / 1357537059087.0,
        -2404267990393.0 / 2016746695238.0,
        -3550918686646.0 / 2091501179385.0,
        -1275806237668.0 / 842570457699.0,
    };
    std::array<double, 5> b = {
        1432997174477.0 / 9575080441755.0,
        5161836677717.0 / 13612068292357.0,
        1720146321549.0 / 2090206949498.0,
        3134564353537.0 / 4481467310338.0,
        2277821191437.0 / 14882151754819.0,
    };
    std::array<double, 5> c = {
        0.0,
        1432997174477.0 / 9575080441755.0,
        2526269341429.0 / 6820363962896.0,
        2006345519317.0 / 3224310063776.0,
        2802321613138.0 / 2924317926251.0,
    };
    double dt = 0.0;
};

/// One low-storage RK step of the scalar ODE u' = f(u, t); used by the
/// order tests and as the reference semantics for lserk_step.
inline double lserk_scalar_step(double u, double t, double dt,
                                const TimeIntegrator& rk,
                                const std::function<double(double, double)>& f)
{
    double res = 0.0;
    for (int i = 0; i < 5; ++i) {
        res = rk.a[i] * res + dt * f(u, t + rk.c[i] * dt);
        u += rk.b[i] * res;
    }
    return u;
}

/// Advance the field state by one step. rhs_eval(state, t, out) must fill
/// out with d(state)/dt. Aborts on NaN in the advanced state.
inline void lserk_step(FieldState& q, const TimeIntegrator& rk,
                       const std::function<void(const FieldState&, double,
                                                FieldState&)>& rhs_eval,
                       FieldState& residual, FieldState& rhs_buf)
{
    const double t0 = q.t;
    for (int i = 0; i < 5; ++i) {
        rhs_eval(q, t0 + rk.c[i] * rk.dt, rhs_buf);
        for (int c = 0; c < 3; ++c) {
            residual.E[c] = rk.a[i] * residual.E[c] + rk.dt * rhs_buf.E[c];
            residual.H[c] = rk.a[i] * residual.H[c] + rk.dt * rhs_buf.H[c];
            q.E[c] += rk.b[i] * residual.E[c];
            q.H[c] += rk.b[i] * residual.H[c];
        }
    }
    q.t = t0 + rk.dt;
    if (!std::isfinite(q.E[0](0, 0)))
        throw std::runtime_error("NaN detected in field state");
}

} // namespace tdlsm

#endif
