#ifndef TDLSM_GEOMETRY_HPP
#define TDLSM_GEOMETRY_HPP

#include "tdlsm/mesh.hpp"

#include <map>
#include <stdexcept>

namespace tdlsm {

/// Per-element affine geometric factors. J is the Jacobian determinant of
/// the reference-to-physical map (element volume = 4J/3); dinv rows hold
/// (rx ry rz; sx sy sz; tx ty tz); sJ is the surface Jacobian per face.
struct GeomFactors {
    std::vector<double> jac;
    std::vector<Eigen::Matrix3d> dinv;
    std::vector<std::array<double, 4>> sjac;
    std::vector<std::array<Vec3, 4>> normal; ///< outward unit normals

    double volume(int elem) const { return 4.0 * jac[elem] / 3.0; }
};

/// Build face-to-face connectivity (into mesh.face_neighbors) and compute
/// geometric factors. Exterior faces must carry a boundary tag.
inline GeomFactors connect_and_factors(Mesh& mesh)
{
    const int nk = mesh.num_elements();
    if (nk == 0) throw std::invalid_argument("empty mesh");

    // connectivity by sorted vertex triple
    std::map<std::array<int, 3>, std::pair<int, int>> open_faces;
    mesh.face_neighbors.assign(nk, {});
    for (int e = 0; e < nk; ++e)
        for (int f = 0; f < 4; ++f) {
            const auto key = mesh.face_key(e, f);
            auto it = open_faces.find(key);
            if (it == open_faces.end()) {
                open_faces[key] = {e, f};
            } else {
                const auto [e2, f2] = it->second;
                mesh.face_neighbors[e][f] = {e2, f2, BoundaryTag::None};
                mesh.face_neighbors[e2][f2] = {e, f, BoundaryTag::None};
                open_faces.erase(it);
            }
        }
    for (const auto& [key, ef] : open_faces) {
        auto it = mesh.boundary_tags.find(key);
        if (it == mesh.boundary_tags.end() || it->second == BoundaryTag::None)
            throw std::runtime_error("exterior face without boundary tag");
        mesh.face_neighbors[ef.first][ef.second] = {
            -1, -1, it->second, mesh.scatterer_faces.count(key) > 0};
    }

    GeomFactors g;
    g.jac.resize(nk);
    g.dinv.resize(nk);
    g.sjac.resize(nk);
    g.normal.resize(nk);
    for (int e = 0; e < nk; ++e) {
        const auto& t = mesh.tets[e];
        Eigen::Matrix3d jm; // columns x_r, x_s, x_t
        jm.col(0) = 0.5 * (mesh.vertices[t[1]] - mesh.vertices[t[0]]);
        jm.col(1) = 0.5 * (mesh.vertices[t[2]] - mesh.vertices[t[0]]);
        jm.col(2) = 0.5 * (mesh.vertices[t[3]] - mesh.vertices[t[0]]);
        const double j = jm.determinant();
        if (j <= 0.0) throw std::runtime_error("degenerate or inverted tet");
        g.jac[e] = j;
        g.dinv[e] = jm.inverse(); // rows are grad r, grad s, grad t

        const Vec3 gr = g.dinv[e].row(0);
        const Vec3 gs = g.dinv[e].row(1);
        const Vec3 gt = g.dinv[e].row(2);
        const std::array<Vec3, 4> raw = {-gt, -gs, gr + gs + gt, -gr};
        for (int f = 0; f < 4; ++f) {
            const double len = raw[f].norm();
            g.normal[e][f] = raw[f] / len;
            g.sjac[e][f] = len * j;
        }
    }
    return g;
}

} // namespace tdlsm

#endif
