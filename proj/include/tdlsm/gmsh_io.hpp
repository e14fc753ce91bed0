#ifndef TDLSM_GMSH_IO_HPP
#define TDLSM_GMSH_IO_HPP

#include "tdlsm/mesh.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

namespace tdlsm {

/// Physical-tag values recognized on boundary triangles of an imported mesh.
enum class GmshPhysical : int {
    PEC = 1,
    Impedance = 2,
    SilverMuller = 3,
    SpongeRegion = 100, ///< volume tag marking absorbing-layer elements
};

/// Import a Gmsh MSH v2.2 ASCII mesh: $Nodes, tetrahedra (element type 4)
/// and tagged boundary triangles (element type 2). Triangle physical tags
/// 1/2/3 map to PEC/Impedance/Silver-Muller; tetrahedra with physical tag
/// 100 are marked as sponge-region elements. Other sections are skipped.
inline Mesh load_gmsh(const std::string& path)
{
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open mesh: " + path);

    Mesh mesh;
    std::map<long, int> node_id; // gmsh ids need not be dense
    std::string line;

    auto expect_line = [&](const std::string& tag) {
        if (!std::getline(f, line) || line.rfind(tag, 0) != 0)
            throw std::runtime_error(path + ": expected " + tag);
    };

    bool saw_nodes = false, saw_elements = false;
    while (std::getline(f, line)) {
        if (line.rfind("$MeshFormat", 0) == 0) {
            if (!std::getline(f, line))
                throw std::runtime_error(path + ": truncated header");
            std::istringstream hdr(line);
            double version = 0;
            int file_type = -1;
            hdr >> version >> file_type;
            if (!(version >= 2.0 && version < 3.0) || file_type != 0)
                throw std::runtime_error(
                    path + ": unsupported MSH format (need v2 ASCII)");
            expect_line("$EndMeshFormat");
        } else if (line.rfind("$Nodes", 0) == 0) {
            saw_nodes = true;
            std::getline(f, line);
            const long n = std::stol(line);
            mesh.vertices.reserve(n);
            for (long i = 0; i < n; ++i) {
                if (!std::getline(f, line))
                    throw std::runtime_error(path + ": truncated $Nodes");
                std::istringstream ss(line);
                long id;
                double x, y, z;
                if (!(ss >> id >> x >> y >> z))
                    throw std::runtime_error(path + ": malformed node line");
                node_id[id] = int(mesh.vertices.size());
                mesh.vertices.push_back({x, y, z});
            }
            expect_line("$EndNodes");
        } else if (line.rfind("$Elements", 0) == 0) {
            saw_elements = true;
            std::getline(f, line);
            const long n = std::stol(line);
            for (long i = 0; i < n; ++i) {
                if (!std::getline(f, line))
                    throw std::runtime_error(path + ": truncated $Elements");
                std::istringstream ss(line);
                long id;
                int type, n_tags;
                if (!(ss >> id >> type >> n_tags))
                    throw std::runtime_error(path +
                                             ": malformed element line");
                int phys = 0;
                for (int t = 0; t < n_tags; ++t) {
                    int tag;
                    ss >> tag;
                    if (t == 0) phys = tag;
                }
                auto resolve = [&](long nid) {
                    auto it = node_id.find(nid);
                    if (it == node_id.end())
                        throw std::runtime_error(path +
                                                 ": element references "
                                                 "unknown node");
                    return it->second;
                };
                if (type == 4) { // 4-node tetrahedron
                    long a, b, c, d;
                    if (!(ss >> a >> b >> c >> d))
                        throw std::runtime_error(path +
                                                 ": malformed tetrahedron");
                    std::array<int, 4> tet = {resolve(a), resolve(b),
                                              resolve(c), resolve(d)};
                    mesh.tets.push_back(tet);
                    if (mesh.signed_volume(mesh.num_elements() - 1) < 0)
                        std::swap(mesh.tets.back()[2], mesh.tets.back()[3]);
                    mesh.element_region.push_back(
                        phys == int(GmshPhysical::SpongeRegion)
                            ? Region::Sponge
                            : Region::Main);
                } else if (type == 2) { // 3-node boundary triangle
                    long a, b, c;
                    if (!(ss >> a >> b >> c))
                        throw std::runtime_error(path +
                                                 ": malformed triangle");
                    BoundaryTag tag;
                    switch (phys) {
                    case int(GmshPhysical::PEC): tag = BoundaryTag::PEC; break;
                    case int(GmshPhysical::Impedance):
                        tag = BoundaryTag::Impedance;
                        break;
                    case int(GmshPhysical::SilverMuller):
                        tag = BoundaryTag::SilverMuller;
                        break;
                    default:
                        throw std::runtime_error(
                            path + ": unknown boundary physical tag " +
                            std::to_string(phys));
                    }
                    std::array<int, 3> key = {resolve(a), resolve(b),
                                              resolve(c)};
                    std::sort(key.begin(), key.end());
                    mesh.boundary_tags[key] = tag;
                } // other element types are ignored
            }
            expect_line("$EndElements");
        } else if (!line.empty() && line[0] == '$') {
            // skip unknown section
            const std::string end = "$End" + line.substr(1);
            while (std::getline(f, line))
                if (line.rfind(end, 0) == 0) break;
        }
    }

    if (!saw_nodes || !saw_elements)
        throw std::runtime_error(path + ": missing $Nodes or $Elements");
    if (mesh.tets.empty())
        throw std::runtime_error(path + ": no tetrahedra found");

    // tagged boundary triangles strictly inside the mesh bounding box are
    // scatterer surfaces; faces on the hull belong to the outer boundary
    if (!mesh.boundary_tags.empty()) {
        Vec3 lo = mesh.vertices.front(), hi = lo;
        for (const auto& v : mesh.vertices) {
            lo = lo.cwiseMin(v);
            hi = hi.cwiseMax(v);
        }
        const double tol = 1e-9 * (hi - lo).norm() + 1e-12;
        for (const auto& [key, tag] : mesh.boundary_tags) {
            const Vec3 c = (mesh.vertices[key[0]] + mesh.vertices[key[1]] +
                            mesh.vertices[key[2]]) /
                           3.0;
            const bool on_hull = ((c - lo).cwiseAbs().minCoeff() < tol) ||
                                 ((hi - c).cwiseAbs().minCoeff() < tol);
            if (!on_hull) mesh.scatterer_faces.insert(key);
        }
    }
    return mesh;
}

} // namespace tdlsm

#endif
