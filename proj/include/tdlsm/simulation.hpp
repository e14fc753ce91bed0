#ifndef TDLSM_SIMULATION_HPP
#define TDLSM_SIMULATION_HPP

#include "tdlsm/dg.hpp"
#include "tdlsm/lserk.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace tdlsm {

/// Total-field E traces recorded at probe points at every solver step.
struct TraceRecord {
    std::vector<Vec3> probes;
    double dt = 0.0;
    int n_steps = 0;
    /// values[p][step] = E(x_p, t_step), t_step = (step+1) * dt
    std::vector<std::vector<Vec3>> values;
};

struct SimulationConfig {
    double t_max = 0.0;
    std::vector<Vec3> probes;
    const DipoleSource* source = nullptr; ///< optional excitation
    double dt_override = 0.0;             ///< 0: use CFL time step
    double instability_factor = 1e6;      ///< abort threshold on field growth
};

/// Integrate the semi-discrete system from t = 0 to t_max, recording the
/// total E field at the probes every step.
inline TraceRecord run_simulation(const DGOperator& op, FieldState& q,
                                  const SimulationConfig& cfg)
{
    if (cfg.t_max <= 0.0) throw std::invalid_argument("t_max must be > 0");
    TimeIntegrator rk;
    rk.dt = (cfg.dt_override > 0.0)
                ? cfg.dt_override
                : cfl_timestep(op.mesh(), op.materials(), op.ref().order);
    const int n_steps = std::max(1, int(std::ceil(cfg.t_max / rk.dt)));
    rk.dt = cfg.t_max / n_steps;

    // resolve probe ownership once
    std::vector<std::pair<int, Vec>> probe_loc;
    for (const auto& p : cfg.probes) {
        auto loc = op.locate(p);
        if (!loc) throw std::runtime_error("probe outside mesh");
        probe_loc.push_back(*loc);
    }

    TraceRecord rec;
    rec.probes = cfg.probes;
    rec.dt = rk.dt;
    rec.n_steps = n_steps;
    rec.values.assign(cfg.probes.size(), {});
    for (auto& v : rec.values) v.reserve(n_steps);

    FieldState residual = op.zero_state();
    FieldState rhs_buf = op.zero_state();
    auto rhs_eval = [&](const FieldState& state, double t, FieldState& out) {
        op.rhs(state, t, out, cfg.source);
    };

    double running_max = 0.0;
    for (int step = 0; step < n_steps; ++step) {
        lserk_step(q, rk, rhs_eval, residual, rhs_buf);
        const double m = q.max_abs();
        running_max = std::max(running_max, m);
        if (running_max > 0.0 && m > cfg.instability_factor * running_max)
            throw std::runtime_error("instability detected: field growth");
        for (std::size_t p = 0; p < probe_loc.size(); ++p)
            rec.values[p].push_back(
                op.interpolate_E(q, probe_loc[p].first, probe_loc[p].second));
    }
    return rec;
}

/// Linear resampling of one probe trace component onto n_out uniform times
/// t_j = j * t_max / n_out, j = 1..n_out.
inline std::vector<Vec3> resample_trace(const std::vector<Vec3>& values,
                                        double dt, double t_max, int n_out)
{
    std::vector<Vec3> out(n_out);
    const int n_in = int(values.size());
    for (int j = 1; j <= n_out; ++j) {
        const double t = j * t_max / n_out;
        // trace samples are at (i+1)*dt
        const double u = t / dt - 1.0;
        const int i0 = std::clamp(int(std::floor(u)), -1, n_in - 1);
        const double w = u - i0;
        const Vec3 v0 = (i0 < 0) ? Vec3::Zero() : values[std::min(i0, n_in - 1)];
        const Vec3 v1 = values[std::min(i0 + 1, n_in - 1)];
        out[j - 1] = (1.0 - w) * v0 + w * v1;
    }
    return out;
}

} // namespace tdlsm

#endif
