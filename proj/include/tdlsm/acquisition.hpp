#ifndef TDLSM_ACQUISITION_HPP
#define TDLSM_ACQUISITION_HPP

#include "tdlsm/dataset.hpp"
#include "tdlsm/simulation.hpp"

#include <stdexcept>

namespace tdlsm {

struct AcquisitionConfig {
    int source_per_face = 3;
    int meas_per_face = 4;
    double grid_half_width = 4.0;
    double t_max = 20.0;
    int n_t = 1250;
    RickerSpec chi;
};

/// Run the full synthetic-data campaign: one forward simulation per
/// (source point, polarization). Each run solves for the scattered field
/// directly — the analytic incident dipole enters only through the boundary
/// data on the scatterer surface — and the recorded field is projected onto
/// the measurement tangents and resampled to the inverse-side time grid.
///
/// The runs are independent; they are distributed over the worker pool with
/// one solver state per worker.
inline DataSet acquire(const Mesh& mesh, const GeomFactors& factors,
                       const MaterialMap& materials,
                       const ReferenceElement& ref, BoundarySpec impedance_bc,
                       const AcquisitionConfig& cfg,
                       const SpongeSpec& sponge = {})
{
    DataSet ds;
    ds.source_grid =
        build_probe_grid(cfg.source_per_face, cfg.grid_half_width,
                         GridRole::Source);
    ds.measurement_grid =
        build_probe_grid(cfg.meas_per_face, cfg.grid_half_width,
                         GridRole::Measurement);
    ds.t_max = cfg.t_max;
    ds.n_t = cfg.n_t;
    ds.chi = cfg.chi;
    ds.allocate();

    const int n_i = ds.n_sources();
    const int n_runs = 2 * n_i;

    parallel_for(0, n_runs, [&](std::int64_t run) {
        const int k = int(run % n_i);
        const int pol = int(run / n_i);

        DGOperator op(mesh, factors, materials, ref, impedance_bc);
        if (sponge.enabled())
            op.set_damping(compute_nodal_beta(op.x(), op.y(), op.z(), sponge));

        DipoleSource src;
        src.y = ds.source_grid.points[k];
        src.p = pol == 0 ? ds.source_grid.tangent1[k]
                         : ds.source_grid.tangent2[k];
        src.chi = cfg.chi;
        src.as_boundary = true;

        SimulationConfig sim;
        sim.t_max = cfg.t_max;
        sim.probes = ds.measurement_grid.points;
        sim.source = &src;

        FieldState q = op.zero_state();
        TraceRecord rec = run_simulation(op, q, sim);

        const int s = pol * n_i + k;
        for (int i = 0; i < ds.n_meas(); ++i) {
            const auto resampled =
                resample_trace(rec.values[i], rec.dt, cfg.t_max, cfg.n_t);
            const Vec3& nu = ds.measurement_grid.normals[i];
            for (int j = 0; j < cfg.n_t; ++j) {
                const Vec3 et = tangential_trace(resampled[j], nu);
                ds.trace(s, i, 0, j) = et.dot(ds.measurement_grid.tangent1[i]);
                ds.trace(s, i, 1, j) = et.dot(ds.measurement_grid.tangent2[i]);
            }
        }
    });

    return ds;
}

} // namespace tdlsm

#endif
