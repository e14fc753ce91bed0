// tdlsm: forward simulation and time-domain linear sampling reconstruction.
//
// Subcommands: mesh, forward, dataset-info, svd, invert, export.
// Exit codes: 0 ok, 2 configuration error, 3 numerical/runtime failure.

#include "tdlsm/acquisition.hpp"
#include "tdlsm/config.hpp"
#include "tdlsm/gmsh_io.hpp"
#include "tdlsm/vtk_io.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace tdlsm;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Experiment {
    Mesh mesh;
    GeomFactors factors;
    MaterialMap materials;
    ReferenceElement ref;
    BoundarySpec impedance_bc;

    explicit Experiment(const ExperimentConfig& cfg) : ref(cfg.order)
    {
        const SpongeSpec sponge = cfg.sponge_spec();
        if (cfg.boundary_kind == "penetrable") {
            mesh = build_box_mesh(cfg.domain_half_width, cfg.target_h, {},
                                  sponge);
            materials = uniform_materials(mesh);
            assign_material_in_boxes(mesh, materials, cfg.scatterers,
                                     cfg.eps_r_scatterer, 1.0);
        } else {
            mesh = build_box_mesh(cfg.domain_half_width, cfg.target_h,
                                  cfg.scatterers, sponge,
                                  cfg.scatterer_bc().kind == BoundaryTag::PEC
                                      ? BoundaryTag::PEC
                                      : BoundaryTag::Impedance);
            materials = uniform_materials(mesh);
        }
        factors = connect_and_factors(mesh);
        impedance_bc = cfg.scatterer_bc();
        if (impedance_bc.kind != BoundaryTag::Impedance)
            impedance_bc = {BoundaryTag::Impedance, 1.0, 1.0};
    }
};

void write_meta(const std::string& artifact_path, const ExperimentConfig& cfg,
                const std::string& kind, const Digest& payload_hash)
{
    nlohmann::json m;
    m["kind"] = kind;
    m["config_hash"] = hex(config_hash(cfg));
    m["payload_hash"] = hex(payload_hash);
    std::ofstream f(artifact_path + ".meta.json");
    f << m.dump(2) << "\n";
}

int cmd_mesh(const ExperimentConfig& cfg, const std::string& out,
             const std::string& import_path)
{
    Mesh mesh;
    GeomFactors factors;
    if (!import_path.empty()) {
        mesh = load_gmsh(import_path);
        factors = connect_and_factors(mesh);
    } else {
        Experiment exp(cfg);
        mesh = std::move(exp.mesh);
        factors = std::move(exp.factors);
    }
    int n_boundary = 0;
    for (const auto& fn : mesh.face_neighbors)
        for (const auto& f : fn) n_boundary += !f.interior();
    std::printf("elements: %d  vertices: %zu  boundary faces: %d\n",
                mesh.num_elements(), mesh.vertices.size(), n_boundary);
    const MaterialMap mat = uniform_materials(mesh);
    std::printf("cfl dt (order %d): %.6e\n", cfg.order,
                cfl_timestep(mesh, mat, cfg.order));
    if (!out.empty()) {
        save_vtk_mesh(mesh, out);
        write_meta(out, cfg, "mesh", {});
        std::printf("wrote %s\n", out.c_str());
    }
    return 0;
}

int cmd_forward(const ExperimentConfig& cfg, const std::string& out)
{
    const auto t0 = Clock::now();
    Experiment exp(cfg);

    AcquisitionConfig acq;
    acq.source_per_face = cfg.source_per_face;
    acq.meas_per_face = cfg.meas_per_face;
    acq.grid_half_width = cfg.probe_half_width;
    acq.t_max = cfg.t_max;
    acq.n_t = cfg.n_t;
    acq.chi.f0 = cfg.f0;

    const double dt = cfl_timestep(exp.mesh, exp.materials, cfg.order);
    const long steps = long(std::ceil(cfg.t_max / dt));
    std::printf("mesh: %d elements, order %d, dt %.6e, %ld steps/run, "
                "%d runs\n",
                exp.mesh.num_elements(), cfg.order, dt, steps,
                12 * cfg.source_per_face * cfg.source_per_face);

    DataSet ds = acquire(exp.mesh, exp.factors, exp.materials, exp.ref,
                         exp.impedance_bc, acq, cfg.sponge_spec());
    const Digest h = save_dataset(ds, out);
    write_meta(out, cfg, "dataset", h);
    std::printf("wrote %s (hash %s)\n", out.c_str(), hex(h).c_str());
    std::printf("wall time: %.1f s\n", seconds_since(t0));
    return 0;
}

int cmd_dataset_info(const std::string& path)
{
    bool hash_ok = false;
    DataSet ds = load_dataset(path, &hash_ok);
    std::printf("sources: %d (x2 polarizations)\nmeasurements: %d "
                "(x2 tangents)\ntime samples: %d over T_max %.4g\n",
                ds.n_sources(), ds.n_meas(), ds.n_t, ds.t_max);
    std::printf("source frequency: %.4g\n", ds.chi.f0);
    double peak = 0.0;
    for (double v : ds.traces) peak = std::max(peak, std::abs(v));
    std::printf("max |trace|: %.6e\n", peak);
    std::printf("operator: %lld x %lld\n",
                2LL * ds.n_meas() * ds.n_t, 2LL * ds.n_sources() * ds.n_t);
    std::printf("content hash: %s (%s)\n", hex(ds.content_hash).c_str(),
                hash_ok ? "ok" : "MISMATCH");
    return hash_ok ? 0 : 3;
}

SVDResult obtain_svd(const NearFieldKernel& kernel, int n_sv,
                     std::uint64_t seed, const std::string& checkpoint,
                     bool allow_compute)
{
    if (!checkpoint.empty() && fs::exists(checkpoint)) {
        bool hash_ok = false;
        SVDResult svd = load_svd(checkpoint, kernel.data_hash(), &hash_ok);
        if (!hash_ok)
            throw std::runtime_error(
                "SVD checkpoint was computed from a different dataset: " +
                checkpoint);
        if (svd.sigma.size() >= n_sv) {
            std::printf("loaded %d singular triplets from %s\n",
                        int(svd.sigma.size()), checkpoint.c_str());
            return svd;
        }
        std::printf("checkpoint has %d < %d triplets; recomputing\n",
                    int(svd.sigma.size()), n_sv);
    }
    if (!allow_compute)
        throw std::runtime_error("no usable SVD checkpoint");
    const auto t0 = Clock::now();
    SVDResult svd = truncated_svd(kernel_operator(kernel), n_sv, seed);
    std::printf("computed %d triplets in %.1f s (sigma_1 %.6e, %s)\n",
                int(svd.sigma.size()), seconds_since(t0), svd.sigma(0),
                svd.converged ? "converged" : "budget exhausted");
    if (!checkpoint.empty()) {
        save_svd(svd, kernel.data_hash(), checkpoint);
        std::printf("wrote %s\n", checkpoint.c_str());
    }
    return svd;
}

int cmd_svd(const ExperimentConfig& cfg, const std::string& dataset_path,
            const std::string& out)
{
    DataSet ds = load_dataset(dataset_path);
    NearFieldKernel kernel = build_kernel(ds);
    int n_max = 0;
    for (int n : cfg.n_sv) n_max = std::max(n_max, n);
    SVDResult svd = obtain_svd(kernel, n_max, cfg.seed, out, true);
    write_meta(out, cfg, "svd", kernel.data_hash());
    const int show = std::min<int>(5, int(svd.sigma.size()));
    for (int i = 0; i < show; ++i)
        std::printf("sigma[%d] = %.6e (residual %.2e)\n", i + 1, svd.sigma(i),
                    svd.residuals(i));
    return 0;
}

int cmd_invert(const ExperimentConfig& cfg, const std::string& dataset_path,
               const std::string& checkpoint, const std::string& out_prefix)
{
    const auto t0 = Clock::now();
    DataSet ds = load_dataset(dataset_path);
    NearFieldKernel kernel = build_kernel(ds);
    int n_max = 0;
    for (int n : cfg.n_sv) n_max = std::max(n_max, n);
    SVDResult full = obtain_svd(kernel, n_max, cfg.seed, checkpoint, true);

    for (int n : cfg.n_sv) {
        SVDResult svd = truncate(full, n);
        IndicatorVolume vol =
            indicator_sweep(kernel, svd, cfg.sampling, cfg.gamma,
                            ds.measurement_grid, ds.chi, ds.t_max, cfg.alpha);
        const std::string base = out_prefix + "_nsv" + std::to_string(n);
        save_csv_volume(vol, base + ".csv");
        save_vtk_volume(vol, base + ".vtk");
        write_meta(base + ".csv", cfg, "indicator_volume", kernel.data_hash());
        std::printf("n_sv %d: isosurface level %.6e (alpha %.3g), "
                    "degenerate points %d/%d\n",
                    n, vol.level, vol.alpha, vol.n_flagged(),
                    vol.grid.size());
        std::printf("wrote %s.{csv,vtk}\n", base.c_str());
    }
    std::printf("wall time: %.1f s\n", seconds_since(t0));
    return 0;
}

int cmd_export(const std::string& volume_csv, const std::string& format,
               const std::string& out)
{
    IndicatorVolume vol = load_csv_volume(volume_csv);
    if (format == "vtk")
        save_vtk_volume(vol, out);
    else if (format == "csv")
        save_csv_volume(vol, out);
    else
        throw std::invalid_argument("unknown export format: " + format);
    std::printf("wrote %s (isosurface level %.6e)\n", out.c_str(), vol.level);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"time-domain linear sampling method toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    int workers = 0;
    std::optional<std::uint64_t> seed;
    app.add_option("--config", config_path, "JSON experiment config");
    app.add_option("--set", overrides, "key=value config overrides");
    app.add_option("--workers", workers, "worker thread count");
    app.add_option("--seed", seed, "RNG seed override");

    auto* c_mesh = app.add_subcommand("mesh", "build or import a mesh");
    std::string mesh_out, mesh_import;
    c_mesh->add_option("--out", mesh_out, "VTK output path");
    c_mesh->add_option("--import", mesh_import, "Gmsh MSH v2 file to import");

    auto* c_fwd = app.add_subcommand("forward", "run the data campaign");
    std::string fwd_out = "dataset.bin";
    c_fwd->add_option("--out", fwd_out, "dataset output path");

    auto* c_info = app.add_subcommand("dataset-info", "inspect a dataset");
    std::string info_path;
    c_info->add_option("dataset", info_path, "dataset path")->required();

    auto* c_svd = app.add_subcommand("svd", "compute an SVD checkpoint");
    std::string svd_dataset, svd_out = "svd.bin";
    c_svd->add_option("dataset", svd_dataset, "dataset path")->required();
    c_svd->add_option("--out", svd_out, "checkpoint output path");

    auto* c_inv = app.add_subcommand("invert", "run the indicator sweep");
    std::string inv_dataset, inv_ckpt, inv_out = "indicator";
    c_inv->add_option("dataset", inv_dataset, "dataset path")->required();
    c_inv->add_option("--checkpoint", inv_ckpt, "SVD checkpoint path");
    c_inv->add_option("--out", inv_out, "output prefix");

    auto* c_exp = app.add_subcommand("export", "convert an indicator volume");
    std::string exp_volume, exp_format = "vtk", exp_out;
    c_exp->add_option("volume", exp_volume, "indicator CSV path")->required();
    c_exp->add_option("--format", exp_format, "vtk | csv");
    c_exp->add_option("--out", exp_out, "output path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        ExperimentConfig cfg;
        if (!config_path.empty()) cfg = load_config(config_path);
        for (const auto& kv : overrides) apply_override(cfg, kv);
        if (seed) cfg.seed = *seed;
        if (workers > 0) set_num_workers(workers);

        // relative output paths land in the configured output directory
        auto resolved = [&](const std::string& p) {
            if (p.empty() || cfg.output_dir.empty() || cfg.output_dir == "." ||
                fs::path(p).is_absolute())
                return p;
            fs::create_directories(cfg.output_dir);
            return (fs::path(cfg.output_dir) / p).string();
        };

        if (c_mesh->parsed())
            return cmd_mesh(cfg, resolved(mesh_out), mesh_import);
        if (c_fwd->parsed()) return cmd_forward(cfg, resolved(fwd_out));
        if (c_info->parsed()) return cmd_dataset_info(info_path);
        if (c_svd->parsed())
            return cmd_svd(cfg, svd_dataset, resolved(svd_out));
        if (c_inv->parsed())
            return cmd_invert(cfg, inv_dataset, resolved(inv_ckpt),
                              resolved(inv_out));
        if (c_exp->parsed())
            return cmd_export(exp_volume, exp_format, resolved(exp_out));
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
