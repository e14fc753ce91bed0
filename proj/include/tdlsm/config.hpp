#ifndef TDLSM_CONFIG_HPP
#define TDLSM_CONFIG_HPP

#include "tdlsm/dg.hpp"
#include "tdlsm/inversion.hpp"
#include "tdlsm/mesh.hpp"
#include "tdlsm/sha256.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace tdlsm {

/// All experiment parameters in one document. Defaults are the values used
/// for the reference two-cube impedance reconstruction.
struct ExperimentConfig {
    // domain and mesh
    double domain_half_width = 4.1;
    double target_h = 2.0 / 3.0; ///< 1.5 elements per wavelength at f0=1
    int order = 3;
    std::vector<Box> scatterers = {
        {{-0.75, -0.75, -0.75}, {-0.25, -0.25, -0.25}},
        {{0.25, 0.25, 0.25}, {0.75, 0.75, 0.75}},
    };
    std::string boundary_kind = "impedance"; ///< pec | impedance | penetrable
    double lambda_imp = std::sqrt(2.0);      ///< impedance parameter
    double eps_r_scatterer = 2.0;            ///< penetrable case only

    // sponge layer (thickness L, cubic damping profile, grid stretching)
    bool sponge_enabled = true;
    double sponge_thickness = 6.0; ///< 6 c0 / f0 at f0=1
    double sponge_beta_max = 10.0; ///< 10 f0 at f0=1
    double sponge_g_max = 0.2;

    // source / acquisition
    double f0 = 1.0;
    double probe_half_width = 4.0;
    int source_per_face = 3;
    int meas_per_face = 4;
    double t_max = 20.0;
    int n_t = 1250;

    // inversion
    SamplingGrid sampling;
    std::vector<int> n_sv = {1000};
    double gamma = 0.1;
    double alpha = 0.1;

    // run control
    std::uint64_t seed = 42;
    std::string output_dir = ".";

    SpongeSpec sponge_spec() const
    {
        SpongeSpec s;
        s.start = domain_half_width;
        s.thickness = sponge_enabled ? sponge_thickness : 0.0;
        s.beta_max = sponge_beta_max;
        s.g_max = sponge_g_max;
        return s;
    }

    BoundarySpec scatterer_bc() const
    {
        if (boundary_kind == "pec")
            return {BoundaryTag::PEC, 1.0, 1.0};
        // impedance parameter: Lambda = sqrt(eps_bc / mu_bc)
        return {BoundaryTag::Impedance, lambda_imp * lambda_imp, 1.0};
    }

    void validate() const
    {
        if (domain_half_width <= 0 || target_h <= 0)
            throw std::invalid_argument("domain/mesh sizes must be positive");
        if (order < 1 || order > 9)
            throw std::invalid_argument("order must be in [1, 9]");
        if (boundary_kind != "pec" && boundary_kind != "impedance" &&
            boundary_kind != "penetrable")
            throw std::invalid_argument("unknown boundary kind: " +
                                        boundary_kind);
        if (boundary_kind == "impedance" && lambda_imp <= 0)
            throw std::invalid_argument("impedance Lambda must be positive");
        if (boundary_kind == "penetrable" && eps_r_scatterer <= 0)
            throw std::invalid_argument("eps_r must be positive");
        if (f0 <= 0 || t_max <= 0 || n_t < 1)
            throw std::invalid_argument("time/frequency parameters invalid");
        if (source_per_face < 1 || meas_per_face < 1 || probe_half_width <= 0)
            throw std::invalid_argument("probe grid parameters invalid");
        if (probe_half_width >= domain_half_width)
            throw std::invalid_argument(
                "probe surface must be inside the main domain");
        if (gamma < 0 || alpha < 0 || alpha > 1)
            throw std::invalid_argument("gamma/alpha out of range");
        if (n_sv.empty())
            throw std::invalid_argument("n_sv list is empty");
        for (int n : n_sv)
            if (n < 1) throw std::invalid_argument("n_sv must be positive");
        if (sponge_enabled &&
            (sponge_thickness <= 0 || sponge_beta_max < 0 || sponge_g_max < 0))
            throw std::invalid_argument("sponge parameters invalid");
        sampling.validate();
        for (const auto& b : scatterers) {
            if (!((b.hi - b.lo).minCoeff() > 0))
                throw std::invalid_argument("scatterer box is degenerate");
            if (b.lo.cwiseAbs().maxCoeff() >= domain_half_width ||
                b.hi.cwiseAbs().maxCoeff() >= domain_half_width)
                throw std::invalid_argument(
                    "scatterer box outside the main domain");
        }
    }
};

namespace detail {

inline nlohmann::json to_json(const ExperimentConfig& c)
{
    nlohmann::json j;
    j["domain_half_width"] = c.domain_half_width;
    j["target_h"] = c.target_h;
    j["order"] = c.order;
    j["scatterers"] = nlohmann::json::array();
    for (const auto& b : c.scatterers)
        j["scatterers"].push_back({{"lo", {b.lo(0), b.lo(1), b.lo(2)}},
                                   {"hi", {b.hi(0), b.hi(1), b.hi(2)}}});
    j["boundary_kind"] = c.boundary_kind;
    j["lambda"] = c.lambda_imp;
    j["eps_r_scatterer"] = c.eps_r_scatterer;
    j["sponge"] = {{"enabled", c.sponge_enabled},
                   {"thickness", c.sponge_thickness},
                   {"beta_max", c.sponge_beta_max},
                   {"g_max", c.sponge_g_max}};
    j["f0"] = c.f0;
    j["probe_half_width"] = c.probe_half_width;
    j["source_per_face"] = c.source_per_face;
    j["meas_per_face"] = c.meas_per_face;
    j["t_max"] = c.t_max;
    j["n_t"] = c.n_t;
    j["sampling"] = {{"lo", {c.sampling.lo(0), c.sampling.lo(1), c.sampling.lo(2)}},
                     {"hi", {c.sampling.hi(0), c.sampling.hi(1), c.sampling.hi(2)}},
                     {"counts", {c.sampling.nx, c.sampling.ny, c.sampling.nz}},
                     {"tau", c.sampling.tau}};
    j["n_sv"] = c.n_sv;
    j["gamma"] = c.gamma;
    j["alpha"] = c.alpha;
    j["seed"] = c.seed;
    j["output_dir"] = c.output_dir;
    return j;
}

inline Vec3 vec3_of(const nlohmann::json& a)
{
    if (!a.is_array() || a.size() != 3)
        throw std::invalid_argument("expected a 3-vector");
    return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

inline void from_json(const nlohmann::json& j, ExperimentConfig& c)
{
    auto opt = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    opt("domain_half_width", c.domain_half_width);
    opt("target_h", c.target_h);
    opt("order", c.order);
    if (j.contains("scatterers")) {
        c.scatterers.clear();
        for (const auto& b : j.at("scatterers"))
            c.scatterers.push_back({vec3_of(b.at("lo")), vec3_of(b.at("hi"))});
    }
    opt("boundary_kind", c.boundary_kind);
    if (j.contains("lambda")) c.lambda_imp = j.at("lambda").get<double>();
    opt("eps_r_scatterer", c.eps_r_scatterer);
    if (j.contains("sponge")) {
        const auto& s = j.at("sponge");
        if (s.contains("enabled")) c.sponge_enabled = s.at("enabled").get<bool>();
        if (s.contains("thickness"))
            c.sponge_thickness = s.at("thickness").get<double>();
        if (s.contains("beta_max")) c.sponge_beta_max = s.at("beta_max").get<double>();
        if (s.contains("g_max")) c.sponge_g_max = s.at("g_max").get<double>();
    }
    opt("f0", c.f0);
    opt("probe_half_width", c.probe_half_width);
    opt("source_per_face", c.source_per_face);
    opt("meas_per_face", c.meas_per_face);
    opt("t_max", c.t_max);
    opt("n_t", c.n_t);
    if (j.contains("sampling")) {
        const auto& s = j.at("sampling");
        if (s.contains("lo")) c.sampling.lo = vec3_of(s.at("lo"));
        if (s.contains("hi")) c.sampling.hi = vec3_of(s.at("hi"));
        if (s.contains("counts")) {
            const auto& n = s.at("counts");
            c.sampling.nx = n[0].get<int>();
            c.sampling.ny = n[1].get<int>();
            c.sampling.nz = n[2].get<int>();
        }
        if (s.contains("tau")) c.sampling.tau = s.at("tau").get<double>();
    }
    opt("n_sv", c.n_sv);
    opt("gamma", c.gamma);
    opt("alpha", c.alpha);
    opt("seed", c.seed);
    opt("output_dir", c.output_dir);
}

} // namespace detail

/// Hash of the canonical serialized form; embedded in every output artifact
/// so provenance survives file shuffling.
inline Digest config_hash(const ExperimentConfig& c)
{
    const std::string dump = detail::to_json(c).dump();
    return Sha256::of(dump.data(), dump.size());
}

inline ExperimentConfig load_config(const std::string& path)
{
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open config: " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
    ExperimentConfig c;
    try {
        detail::from_json(j, c);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
    c.validate();
    return c;
}

inline void save_config(const ExperimentConfig& c, const std::string& path)
{
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for write: " + path);
    f << detail::to_json(c).dump(2) << "\n";
}

/// Apply one `key=value` or dotted `section.key=value` override.
inline void apply_override(ExperimentConfig& c, const std::string& kv)
{
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("override must be key=value: " + kv);
    const std::string key = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);

    nlohmann::json j = detail::to_json(c);
    nlohmann::json* node = &j;
    std::string leaf = key;
    for (auto dot = leaf.find('.'); dot != std::string::npos;
         dot = leaf.find('.')) {
        node = &(*node)[leaf.substr(0, dot)];
        leaf = leaf.substr(dot + 1);
    }
    // parse value as JSON if possible (numbers, arrays, bools), else string
    try {
        (*node)[leaf] = nlohmann::json::parse(value);
    } catch (const nlohmann::json::exception&) {
        (*node)[leaf] = value;
    }
    ExperimentConfig fresh;
    detail::from_json(j, fresh);
    fresh.validate();
    c = fresh;
}

} // namespace tdlsm

#endif
