#ifndef TDLSM_INCIDENT_HPP
#define TDLSM_INCIDENT_HPP

#include "tdlsm/math.hpp"

#include <cmath>
#include <stdexcept>

namespace tdlsm {

/// Ricker wavelet parameters; a = -(pi f0)^2, delay t0 = 1.2/f0.
struct RickerSpec {
    double f0 = 1.0;

    double a() const { return -(M_PI * f0) * (M_PI * f0); }
    double t0() const { return 1.2 / f0; }
};

/// chi(t) = -(1 + 2a (t-t0)^2) exp(a (t-t0)^2)
inline double ricker(double t, const RickerSpec& spec)
{
    const double d = t - spec.t0();
    const double ad2 = spec.a() * d * d;
    return -(1.0 + 2.0 * ad2) * std::exp(ad2);
}

/// Analytic time derivative of the Ricker wavelet.
inline double ricker_dt(double t, const RickerSpec& spec)
{
    const double d = t - spec.t0();
    const double ad2 = spec.a() * d * d;
    // d/dt [-(1+2a d^2) e^{a d^2}] = -2 a d (3 + 2 a d^2) e^{a d^2}
    return -2.0 * spec.a() * d * (3.0 + 2.0 * ad2) * std::exp(ad2);
}

/// Antiderivative of the Ricker wavelet, X(t) = integral of chi up to t;
/// X(t) = -(t - t0) exp(a (t - t0)^2), vanishing in both tails.
inline double ricker_int(double t, const RickerSpec& spec)
{
    const double d = t - spec.t0();
    return -d * std::exp(spec.a() * d * d);
}

/// Ricker-smoothed retarded fundamental solution of the wave equation
/// (c0 = 1): chi(t - |r|) / (4 pi |r|).
inline double phi_chi(const Vec3& r, double t, const RickerSpec& spec)
{
    const double dist = r.norm();
    if (dist <= 0.0) throw std::invalid_argument("phi_chi: r = 0 is singular");
    return ricker(t - dist, spec) / (4.0 * M_PI * dist);
}

/// Regularized magnetic dipole source located at y with unit polarization p,
/// fired with delay tau.
struct DipoleSource {
    Vec3 y = Vec3::Zero();
    Vec3 p = Vec3::UnitZ();
    RickerSpec chi;
    double tau = 0.0;
    /// Drive the scatterer boundary data of a scattered-field simulation
    /// instead of injecting a volume current at y.
    bool as_boundary = false;
};

/// Electric field of the regularized magnetic dipole, curl_x(p Phi_chi).
///
/// With r = x - y, R = |r|, rhat = r/R and retarded argument
/// ts = t - tau - R:
///   E = p x rhat * ( chi'(ts) / (4 pi R) + chi(ts) / (4 pi R^2) )
/// The sign is pinned by the finite-difference curl oracle in the tests.
inline Vec3 dipole_E(const Vec3& x, double t, const DipoleSource& src)
{
    const Vec3 r = x - src.y;
    const double dist = r.norm();
    if (dist <= 0.0)
        throw std::invalid_argument("dipole_E: evaluation at the source point");
    const double ts = t - src.tau - dist;
    const double amp = ricker_dt(ts, src.chi) / (4.0 * M_PI * dist) +
                       ricker(ts, src.chi) / (4.0 * M_PI * dist * dist);
    return src.p.cross(r / dist) * amp;
}

/// Magnetic field completing dipole_E to a causal Maxwell pair
/// (dE/dt = curl H, dH/dt = -curl E away from the source):
///   H = p chi'(ts) / (4 pi R) - grad(p . grad Phi_X)
/// where Phi_X is phi with chi replaced by its antiderivative X
/// (X' = chi, X'' = chi'), which keeps H divergence free and causal.
inline Vec3 dipole_H(const Vec3& x, double t, const DipoleSource& src)
{
    const Vec3 r = x - src.y;
    const double dist = r.norm();
    if (dist <= 0.0)
        throw std::invalid_argument("dipole_H: evaluation at the source point");
    const Vec3 rhat = r / dist;
    const double ts = t - src.tau - dist;
    const double xi = ricker_int(ts, src.chi);
    const double c = ricker(ts, src.chi);
    const double cp = ricker_dt(ts, src.chi);
    const double pr = src.p.dot(rhat);
    const Vec3 grad =
        ((3.0 * pr * rhat - src.p) * (xi / (dist * dist * dist) +
                                      c / (dist * dist)) +
         rhat * (pr * cp / dist)) /
        (4.0 * M_PI);
    return src.p * (cp / (4.0 * M_PI * dist)) - grad;
}

/// Tangential trace v_T = (nu x v) x nu = v - (v . nu) nu for a unit normal.
inline Vec3 tangential_trace(const Vec3& v, const Vec3& nu)
{
    return v - v.dot(nu) * nu;
}

} // namespace tdlsm

#endif
