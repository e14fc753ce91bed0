#ifndef TDLSM_VTK_IO_HPP
#define TDLSM_VTK_IO_HPP

#include "tdlsm/dataset.hpp"
#include "tdlsm/inversion.hpp"
#include "tdlsm/mesh.hpp"

#include <vector>

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>

namespace tdlsm {

/// Legacy VTK unstructured-grid ASCII export of a tetrahedral mesh, with the
/// element region (main/sponge) as cell data for inspection.
inline void save_vtk_mesh(const Mesh& mesh, const std::string& path)
{
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for write: " + path);
    f << "# vtk DataFile Version 3.0\n"
      << "tetrahedral mesh\n"
      << "ASCII\n"
      << "DATASET UNSTRUCTURED_GRID\n";
    f << "POINTS " << mesh.vertices.size() << " double\n";
    f << std::setprecision(17);
    for (const auto& v : mesh.vertices)
        f << v(0) << " " << v(1) << " " << v(2) << "\n";
    f << "CELLS " << mesh.tets.size() << " " << 5 * mesh.tets.size() << "\n";
    for (const auto& t : mesh.tets)
        f << "4 " << t[0] << " " << t[1] << " " << t[2] << " " << t[3] << "\n";
    f << "CELL_TYPES " << mesh.tets.size() << "\n";
    for (std::size_t i = 0; i < mesh.tets.size(); ++i) f << "10\n";
    if (mesh.element_region.size() == mesh.tets.size()) {
        f << "CELL_DATA " << mesh.tets.size() << "\n"
          << "SCALARS region int 1\nLOOKUP_TABLE default\n";
        for (auto r : mesh.element_region)
            f << (r == Region::Sponge ? 1 : 0) << "\n";
    }
    if (!f) throw std::runtime_error("write failed: " + path);
}

/// Legacy VTK structured-points ASCII export of an indicator volume. The
/// isosurface level is embedded in the header comment line so viewers can
/// reproduce the reconstruction's isosurface directly.
inline void save_vtk_volume(const IndicatorVolume& vol, const std::string& path)
{
    const auto& g = vol.grid;
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for write: " + path);
    auto spacing = [&](double a, double b, int n) {
        return n > 1 ? (b - a) / (n - 1) : 1.0;
    };
    f << "# vtk DataFile Version 3.0\n"
      << "indicator volume alpha=" << vol.alpha << " level=" << std::setprecision(17)
      << vol.level << "\n"
      << "ASCII\n"
      << "DATASET STRUCTURED_POINTS\n"
      << "DIMENSIONS " << g.nx << " " << g.ny << " " << g.nz << "\n"
      << "ORIGIN " << g.lo(0) << " " << g.lo(1) << " " << g.lo(2) << "\n"
      << "SPACING " << spacing(g.lo(0), g.hi(0), g.nx) << " "
      << spacing(g.lo(1), g.hi(1), g.ny) << " "
      << spacing(g.lo(2), g.hi(2), g.nz) << "\n"
      << "POINT_DATA " << g.size() << "\n"
      << "SCALARS psi double 1\nLOOKUP_TABLE default\n";
    // structured points iterate x fastest, matching SamplingGrid::index
    for (int i = 0; i < g.size(); ++i) f << vol.psi[i] << "\n";
    if (!f) throw std::runtime_error("write failed: " + path);
}

/// CSV of (x,y,z,psi) rows with a header; grid shape and isosurface metadata
/// ride in '#' comment lines before the header so the volume round-trips.
inline void save_csv_volume(const IndicatorVolume& vol, const std::string& path)
{
    const auto& g = vol.grid;
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for write: " + path);
    f << std::setprecision(17);
    f << "# dims," << g.nx << "," << g.ny << "," << g.nz << "\r\n";
    f << "# box," << g.lo(0) << "," << g.lo(1) << "," << g.lo(2) << ","
      << g.hi(0) << "," << g.hi(1) << "," << g.hi(2) << "\r\n";
    f << "# alpha," << vol.alpha << ",level," << vol.level << "\r\n";
    f << "x,y,z,psi\r\n";
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const Vec3 p = g.point(i, j, k);
                f << p(0) << "," << p(1) << "," << p(2) << ","
                  << vol.psi[g.index(i, j, k)] << "\r\n";
            }
    if (!f) throw std::runtime_error("write failed: " + path);
}

inline IndicatorVolume load_csv_volume(const std::string& path)
{
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open volume csv: " + path);
    IndicatorVolume vol;
    std::string line;
    bool have_dims = false;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ss(line.substr(1));
            std::string tok;
            std::getline(ss, tok, ',');
            // trim leading space of the key
            const auto key = tok.substr(tok.find_first_not_of(' '));
            std::vector<std::string> rest;
            while (std::getline(ss, tok, ',')) rest.push_back(tok);
            if (key == "dims" && rest.size() == 3) {
                vol.grid.nx = std::stoi(rest[0]);
                vol.grid.ny = std::stoi(rest[1]);
                vol.grid.nz = std::stoi(rest[2]);
                have_dims = true;
            } else if (key == "box" && rest.size() == 6) {
                for (int d = 0; d < 3; ++d) {
                    vol.grid.lo(d) = std::stod(rest[d]);
                    vol.grid.hi(d) = std::stod(rest[3 + d]);
                }
            } else if (key == "alpha" && rest.size() == 3) {
                vol.alpha = std::stod(rest[0]);
                vol.level = std::stod(rest[2]);
            }
            continue;
        }
        if (line.rfind("x,", 0) == 0) continue; // header row
        std::istringstream ss(line);
        std::string cell;
        double vals[4];
        for (int c = 0; c < 4; ++c) {
            if (!std::getline(ss, cell, ','))
                throw std::runtime_error(path + ": short csv row");
            vals[c] = std::stod(cell);
        }
        vol.psi.push_back(vals[3]);
    }
    if (!have_dims || int(vol.psi.size()) != vol.grid.size())
        throw std::runtime_error(path + ": csv volume shape mismatch");
    vol.flagged.assign(vol.psi.size(), 0);
    vol.norms.assign(3 * vol.psi.size(), 0.0);
    return vol;
}

/// CSV export of measured traces for one source index: time plus one column
/// per (measurement point, tangent).
inline void save_csv_traces(const DataSet& ds, int source_index,
                            const std::string& path)
{
    if (source_index < 0 || source_index >= 2 * ds.n_sources())
        throw std::invalid_argument("source index out of range");
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for write: " + path);
    f << std::setprecision(17);
    f << "t";
    for (int i = 0; i < ds.n_meas(); ++i)
        for (int q = 0; q < 2; ++q) f << ",m" << i << "q" << q;
    f << "\r\n";
    for (int j = 0; j < ds.n_t; ++j) {
        f << (j + 1) * ds.t_max / ds.n_t;
        for (int i = 0; i < ds.n_meas(); ++i)
            for (int q = 0; q < 2; ++q)
                f << "," << ds.trace(source_index, i, q, j);
        f << "\r\n";
    }
    if (!f) throw std::runtime_error("write failed: " + path);
}

} // namespace tdlsm

#endif
