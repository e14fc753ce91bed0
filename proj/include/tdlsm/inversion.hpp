#ifndef TDLSM_INVERSION_HPP
#define TDLSM_INVERSION_HPP

#include "tdlsm/incident.hpp"
#include "tdlsm/nearfield.hpp"
#include "tdlsm/probe_grid.hpp"
#include "tdlsm/svd.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace tdlsm {

/// Uniform axis-aligned sampling grid of candidate points z; the auxiliary
/// dipole delay tau is shared by all points, and the three axis directions
/// serve as sampling polarizations.
struct SamplingGrid {
    Vec3 lo{-1.5, -1.5, -1.5};
    Vec3 hi{1.5, 1.5, 1.5};
    int nx = 41, ny = 41, nz = 41;
    double tau = 0.0;

    int size() const { return nx * ny * nz; }
    int index(int i, int j, int k) const { return (k * ny + j) * nx + i; }
    Vec3 point(int i, int j, int k) const
    {
        auto coord = [](double a, double b, int n, int m) {
            return n == 1 ? 0.5 * (a + b) : a + (b - a) * m / double(n - 1);
        };
        return {coord(lo(0), hi(0), nx, i), coord(lo(1), hi(1), ny, j),
                coord(lo(2), hi(2), nz, k)};
    }
    void validate() const
    {
        if (nx < 1 || ny < 1 || nz < 1)
            throw std::invalid_argument("sampling grid counts must be >= 1");
        for (int d = 0; d < 3; ++d)
            if (!(lo(d) <= hi(d)))
                throw std::invalid_argument("sampling grid box is inverted");
    }
};

/// Indicator values Psi(z) on the sampling grid, the per-point density norms
/// they were formed from, and the isosurface-level metadata.
struct IndicatorVolume {
    SamplingGrid grid;
    std::vector<double> psi;           ///< grid.size() values
    std::vector<double> norms;         ///< 3 per point: ||g(.;z,e_j)||
    std::vector<std::uint8_t> flagged; ///< degenerate / failed points
    double alpha = 0.1;
    double level = 0.0;

    int n_flagged() const
    {
        int n = 0;
        for (auto f : flagged) n += f != 0;
        return n;
    }
};

/// Flatten a trace/density matrix (n_t x n_cols, column per flattened probe
/// index) into the stacked vector the SVD operates on, and back.
inline Vec flatten(const Mat& m)
{
    return Eigen::Map<const Vec>(m.data(), m.size());
}
inline Mat unflatten(const Vec& v, int n_t, int n_cols)
{
    return Eigen::Map<const Mat>(v.data(), n_t, n_cols);
}

/// Wrap a kernel as a matrix-free operator over stacked vectors.
inline LinearOperator kernel_operator(const NearFieldKernel& kernel)
{
    LinearOperator op;
    op.rows = std::int64_t(kernel.rows()) * kernel.n_t;
    op.cols = std::int64_t(kernel.cols()) * kernel.n_t;
    const NearFieldKernel* k = &kernel;
    op.apply = [k](const Vec& g) {
        return flatten(apply(*k, unflatten(g, k->n_t, k->cols())));
    };
    op.apply_adjoint = [k](const Vec& r) {
        return flatten(apply_adjoint(*k, unflatten(r, k->n_t, k->rows())));
    };
    return op;
}

/// Right-hand side of the discrete near-field equation: tangential traces of
/// the auxiliary dipole at z with polarization p, sampled at the given times
/// and projected onto the measurement tangents.
inline TraceVector rhs_vector(const Vec3& z, const Vec3& p, double tau,
                              const ProbeGrid& grid_m,
                              const std::vector<double>& times,
                              const RickerSpec& chi)
{
    const int n_t = int(times.size());
    const int n_m = grid_m.size();
    for (int i = 0; i < n_m; ++i)
        if ((grid_m.points[i] - z).norm() < 1e-12)
            throw std::invalid_argument(
                "sampling point coincides with a measurement point");

    DipoleSource src;
    src.y = z;
    src.p = p;
    src.chi = chi;
    src.tau = tau;

    TraceVector b(n_t, 2 * n_m);
    for (int i = 0; i < n_m; ++i) {
        const Vec3& x = grid_m.points[i];
        const Vec3& nu = grid_m.normals[i];
        for (int j = 0; j < n_t; ++j) {
            const Vec3 et = tangential_trace(dipole_E(x, times[j], src), nu);
            b(j, 2 * i + 0) = et.dot(grid_m.tangent1[i]);
            b(j, 2 * i + 1) = et.dot(grid_m.tangent2[i]);
        }
    }
    return b;
}

inline std::vector<double> trace_times(double t_max, int n_t)
{
    std::vector<double> t(n_t);
    for (int j = 0; j < n_t; ++j) t[j] = (j + 1) * t_max / n_t;
    return t;
}

inline double isosurface_level(const IndicatorVolume& vol, double alpha);

/// For each sampling point and each axis polarization, solve the regularized
/// near-field equation and accumulate Psi(z) = 1 / sum_j ||g(.;z,e_j)||.
/// Points where a solve produces non-finite norms (or all-zero data) are
/// flagged and carry Psi = 0.
inline IndicatorVolume indicator_sweep(const NearFieldKernel& kernel,
                                       const SVDResult& svd,
                                       const SamplingGrid& grid, double gamma,
                                       const ProbeGrid& grid_m,
                                       const RickerSpec& chi, double t_max,
                                       double alpha = 0.1)
{
    grid.validate();
    if (svd.sigma.size() == 0)
        throw std::invalid_argument("empty SVD in indicator sweep");
    if (grid_m.size() != kernel.n_m)
        throw std::invalid_argument("measurement grid / kernel mismatch");

    IndicatorVolume vol;
    vol.grid = grid;
    vol.alpha = alpha;
    vol.psi.assign(grid.size(), 0.0);
    vol.norms.assign(std::size_t(3) * grid.size(), 0.0);
    vol.flagged.assign(grid.size(), 0);

    const auto times = trace_times(t_max, kernel.n_t);

    parallel_for(0, grid.size(), [&](std::int64_t idx) {
        const int i = int(idx) % grid.nx;
        const int j = (int(idx) / grid.nx) % grid.ny;
        const int k = int(idx) / (grid.nx * grid.ny);
        const Vec3 z = grid.point(i, j, k);

        double sum = 0.0;
        bool ok = true;
        for (int d = 0; d < 3 && ok; ++d) {
            const Vec3 p = Vec3::Unit(d);
            const TraceVector b =
                rhs_vector(z, p, grid.tau, grid_m, times, chi);
            const double nsq = regularized_norm_sq(svd, flatten(b), gamma);
            if (!std::isfinite(nsq)) { ok = false; break; }
            const double n = std::sqrt(nsq);
            vol.norms[3 * idx + d] = n;
            sum += n;
        }
        if (!ok || sum <= 0.0) {
            vol.flagged[idx] = 1;
            vol.psi[idx] = 0.0;
        } else {
            vol.psi[idx] = 1.0 / sum;
        }
    });

    if (vol.n_flagged() < grid.size()) vol.level = isosurface_level(vol, alpha);
    return vol;
}

/// alpha * min Psi + (1 - alpha) * max Psi over non-flagged points.
inline double isosurface_level(const IndicatorVolume& vol, double alpha)
{
    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < vol.psi.size(); ++i) {
        if (vol.flagged[i]) continue;
        if (!any) { lo = hi = vol.psi[i]; any = true; }
        lo = std::min(lo, vol.psi[i]);
        hi = std::max(hi, vol.psi[i]);
    }
    if (!any)
        throw std::invalid_argument("degenerate indicator volume");
    return alpha * lo + (1.0 - alpha) * hi;
}

} // namespace tdlsm

#endif
