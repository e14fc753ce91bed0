#ifndef TDLSM_DATASET_HPP
#define TDLSM_DATASET_HPP

#include "tdlsm/incident.hpp"
#include "tdlsm/probe_grid.hpp"
#include "tdlsm/sha256.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace tdlsm {

/// Recorded tangential scattered-field traces for the whole campaign.
///
/// traces are indexed [s][i][q][j]: s = flattened (source k, polarization l)
/// with s = k for l = 1 and s = N_I + k for l = 2; i = measurement point;
/// q = measurement tangent; j = time sample t_j = j * t_max / n_t, j = 1..n_t.
struct DataSet {
    ProbeGrid source_grid;
    ProbeGrid measurement_grid;
    double t_max = 0.0;
    int n_t = 0;
    RickerSpec chi;
    std::vector<double> traces;
    Digest content_hash{}; ///< filled on save/load

    int n_sources() const { return source_grid.size(); }
    int n_meas() const { return measurement_grid.size(); }

    std::size_t index(int s, int i, int q, int j) const
    {
        return ((std::size_t(s) * n_meas() + i) * 2 + q) * n_t + j;
    }
    double& trace(int s, int i, int q, int j)
    {
        return traces[index(s, i, q, j)];
    }
    double trace(int s, int i, int q, int j) const
    {
        return traces[index(s, i, q, j)];
    }

    void allocate()
    {
        traces.assign(std::size_t(2) * n_sources() * n_meas() * 2 * n_t, 0.0);
    }
};

namespace detail {

template <typename T> void put(std::string& buf, const T& v)
{
    const char* p = reinterpret_cast<const char*>(&v);
    buf.append(p, sizeof(T));
}

template <typename T> T get(const std::string& buf, std::size_t& pos)
{
    if (pos + sizeof(T) > buf.size())
        throw std::runtime_error("dataset file truncated");
    T v;
    std::memcpy(&v, buf.data() + pos, sizeof(T));
    pos += sizeof(T);
    return v;
}

inline void put_grid(std::string& buf, const ProbeGrid& g)
{
    for (const auto& p : g.points)
        for (int d = 0; d < 3; ++d) put(buf, p(d));
    for (const auto& p : g.normals)
        for (int d = 0; d < 3; ++d) put(buf, p(d));
    for (const auto& p : g.tangent1)
        for (int d = 0; d < 3; ++d) put(buf, p(d));
    for (const auto& p : g.tangent2)
        for (int d = 0; d < 3; ++d) put(buf, p(d));
    for (double w : g.weights) put(buf, w);
}

inline ProbeGrid get_grid(const std::string& buf, std::size_t& pos, int n)
{
    ProbeGrid g;
    auto vecs = [&](std::vector<Vec3>& out) {
        out.resize(n);
        for (auto& p : out)
            for (int d = 0; d < 3; ++d) p(d) = get<double>(buf, pos);
    };
    vecs(g.points);
    vecs(g.normals);
    vecs(g.tangent1);
    vecs(g.tangent2);
    g.weights.resize(n);
    for (auto& w : g.weights) w = get<double>(buf, pos);
    double hw = 0.0;
    for (const auto& p : g.points) hw = std::max(hw, p.cwiseAbs().maxCoeff());
    g.half_width = hw;
    g.per_face_n = int(std::lround(std::sqrt(n / 6.0)));
    return g;
}

} // namespace detail

inline constexpr char kDataSetMagic[9] = "TDLSM001";

/// Serialize to the fixed little-endian binary format; trailing 32-byte
/// SHA-256 over everything preceding it. Returns the content hash.
inline Digest save_dataset(const DataSet& ds, const std::string& path)
{
    std::string buf;
    buf.append(kDataSetMagic, 8);
    detail::put<std::uint32_t>(buf, std::uint32_t(ds.n_sources()));
    detail::put<std::uint32_t>(buf, std::uint32_t(ds.n_meas()));
    detail::put<std::uint32_t>(buf, std::uint32_t(ds.n_t));
    detail::put<double>(buf, ds.t_max);
    detail::put<double>(buf, ds.chi.f0);
    detail::put_grid(buf, ds.source_grid);
    detail::put_grid(buf, ds.measurement_grid);
    for (double v : ds.traces) detail::put(buf, v);
    const Digest h = Sha256::of(buf.data(), buf.size());
    buf.append(reinterpret_cast<const char*>(h.data()), h.size());

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open for write: " + path);
    f.write(buf.data(), std::streamsize(buf.size()));
    if (!f) throw std::runtime_error("write failed: " + path);
    return h;
}

/// Load and validate. Throws on magic/version mismatch or truncation; a
/// hash mismatch only sets *hash_ok = false (file may still be usable).
inline DataSet load_dataset(const std::string& path, bool* hash_ok = nullptr)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open dataset: " + path);
    std::string buf((std::istreambuf_iterator<char>(f)),
                    std::istreambuf_iterator<char>());
    if (buf.size() < 8 + 32 || std::memcmp(buf.data(), kDataSetMagic, 8) != 0)
        throw std::runtime_error("bad dataset magic: " + path);

    std::size_t pos = 8;
    DataSet ds;
    const auto n_i = detail::get<std::uint32_t>(buf, pos);
    const auto n_m = detail::get<std::uint32_t>(buf, pos);
    ds.n_t = int(detail::get<std::uint32_t>(buf, pos));
    ds.t_max = detail::get<double>(buf, pos);
    ds.chi.f0 = detail::get<double>(buf, pos);
    ds.source_grid = detail::get_grid(buf, pos, int(n_i));
    ds.measurement_grid = detail::get_grid(buf, pos, int(n_m));
    const std::size_t n_trace = std::size_t(2) * n_i * n_m * 2 * ds.n_t;
    ds.traces.resize(n_trace);
    for (auto& v : ds.traces) v = detail::get<double>(buf, pos);

    if (pos + 32 != buf.size())
        throw std::runtime_error("dataset payload size mismatch: " + path);
    Digest stored;
    std::memcpy(stored.data(), buf.data() + pos, 32);
    const Digest computed = Sha256::of(buf.data(), pos);
    ds.content_hash = computed;
    if (hash_ok) *hash_ok = (stored == computed);
    return ds;
}

} // namespace tdlsm

#endif
