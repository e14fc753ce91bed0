#ifndef TDLSM_SPONGE_HPP
#define TDLSM_SPONGE_HPP

#include "tdlsm/math.hpp"

#include <algorithm>
#include <cmath>

namespace tdlsm {

/// Absorbing-layer parameters. The layer occupies [start, start + thickness]
/// in unstretched coordinates on each side of each axis (applied symmetrically
/// via |x|), with cubic grid stretching up to g_max and cubic damping up to
/// beta_max.
struct SpongeSpec {
    double start = 0.0;     ///< |x| at which the layer begins
    double thickness = 0.0; ///< L, unstretched layer thickness
    double beta_max = 0.0;  ///< peak damping coefficient (1/time)
    double g_max = 0.0;     ///< peak stretching coefficient

    bool enabled() const { return thickness > 0.0; }
    /// physical (stretched) layer thickness
    double stretched_thickness() const { return thickness * (1.0 + g_max); }
};

/// Cubic grid stretching of a one-sided layer coordinate. Identity outside
/// [start, start + thickness]; strictly increasing for g_max >= 0.
inline double stretch_coordinate(double x, const SpongeSpec& spec)
{
    if (!spec.enabled() || x <= spec.start) return x;
    const double d = std::min(x, spec.start + spec.thickness) - spec.start;
    const double u = d / spec.thickness;
    const double stretched = spec.start + d * (1.0 + spec.g_max * u * u * u);
    // beyond the layer end, translate by the accumulated stretch
    return stretched + std::max(0.0, x - (spec.start + spec.thickness));
}

/// Cubic damping profile evaluated at a stretched coordinate; clamped to
/// [0, beta_max].
inline double sponge_beta(double x_stretched, const SpongeSpec& spec)
{
    if (!spec.enabled() || x_stretched <= spec.start) return 0.0;
    const double lhat = spec.stretched_thickness();
    const double u = std::min((x_stretched - spec.start) / lhat, 1.0);
    return spec.beta_max * u * u * u;
}

/// Multi-axis damping at a (stretched) point: per-axis contributions are
/// combined by maximum so corner regions are not over-damped.
inline double sponge_beta3(const Vec3& x_stretched, const SpongeSpec& spec)
{
    double b = 0.0;
    for (int d = 0; d < 3; ++d)
        b = std::max(b, sponge_beta(std::abs(x_stretched(d)), spec));
    return b;
}

} // namespace tdlsm

#endif
