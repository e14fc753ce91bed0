#ifndef TDLSM_MESH_HPP
#define TDLSM_MESH_HPP

#include "tdlsm/math.hpp"
#include "tdlsm/sponge.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

namespace tdlsm {

enum class BoundaryTag : std::uint8_t {
    None = 0,
    PEC,
    Impedance,
    SilverMuller,
};

enum class Region : std::uint8_t { Main, Sponge };

/// Per-face connectivity record: either an interior neighbor (elem >= 0)
/// or a tagged exterior face.
struct FaceNeighbor {
    int elem = -1;
    int face = -1;
    BoundaryTag tag = BoundaryTag::None;
    bool scatterer = false; ///< exterior face on a scatterer surface

    bool interior() const { return elem >= 0; }
};

struct Box {
    Vec3 lo = Vec3::Zero();
    Vec3 hi = Vec3::Zero();

    bool contains(const Vec3& p) const
    {
        return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
    }
    double min_edge() const { return (hi - lo).minCoeff(); }
};

/// Tetrahedral mesh. Faces of element k follow the reference ordering:
/// face 0: nodes {0,1,2}, face 1: {0,1,3}, face 2: {1,2,3}, face 3: {0,2,3}.
struct Mesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 4>> tets;
    std::vector<std::array<FaceNeighbor, 4>> face_neighbors; // by connect_and_factors
    std::vector<Region> element_region;
    /// boundary tag per exterior face, keyed by the sorted vertex triple
    std::map<std::array<int, 3>, BoundaryTag> boundary_tags;
    /// exterior faces that belong to a scatterer surface (not the outer box)
    std::set<std::array<int, 3>> scatterer_faces;

    int num_elements() const { return int(tets.size()); }

    static std::array<int, 4> face_vertex_ids(int face)
    {
        switch (face) {
        case 0: return {0, 1, 2, -1};
        case 1: return {0, 1, 3, -1};
        case 2: return {1, 2, 3, -1};
        default: return {0, 2, 3, -1};
        }
    }

    std::array<int, 3> face_key(int elem, int face) const
    {
        const auto fv = face_vertex_ids(face);
        std::array<int, 3> key = {tets[elem][fv[0]], tets[elem][fv[1]],
                                  tets[elem][fv[2]]};
        std::sort(key.begin(), key.end());
        return key;
    }

    double signed_volume(int elem) const
    {
        const auto& t = tets[elem];
        const Vec3 a = vertices[t[1]] - vertices[t[0]];
        const Vec3 b = vertices[t[2]] - vertices[t[0]];
        const Vec3 c = vertices[t[3]] - vertices[t[0]];
        return a.cross(b).dot(c) / 6.0;
    }

    Vec3 centroid(int elem) const
    {
        const auto& t = tets[elem];
        return (vertices[t[0]] + vertices[t[1]] + vertices[t[2]] +
                vertices[t[3]]) / 4.0;
    }
};

/// Per-element scalar materials plus the nodal damping field (filled in by
/// the DG setup once nodal coordinates exist).
struct MaterialMap {
    std::vector<double> eps_r;
    std::vector<double> mu_r;
    Mat beta; ///< np x K nodal damping, zero outside the sponge

    double wave_speed(int elem) const
    {
        return 1.0 / std::sqrt(eps_r[elem] * mu_r[elem]);
    }
};

inline MaterialMap uniform_materials(const Mesh& mesh, double eps = 1.0,
                                     double mu = 1.0)
{
    MaterialMap m;
    m.eps_r.assign(mesh.num_elements(), eps);
    m.mu_r.assign(mesh.num_elements(), mu);
    return m;
}

/// Assign (eps_r, mu_r) to every element whose centroid lies in one of the
/// boxes; used for penetrable scatterers.
inline void assign_material_in_boxes(const Mesh& mesh, MaterialMap& mat,
                                     const std::vector<Box>& boxes, double eps,
                                     double mu)
{
    for (int k = 0; k < mesh.num_elements(); ++k) {
        const Vec3 c = mesh.centroid(k);
        for (const auto& b : boxes)
            if (b.contains(c)) {
                mat.eps_r[k] = eps;
                mat.mu_r[k] = mu;
            }
    }
}

namespace detail {

/// Coordinates of the grid planes along one axis: uniform spacing in the
/// main region, relaxed spacing in the (unstretched) sponge extension.
inline std::vector<double> axis_planes(double half_width, double h_main,
                                       const SpongeSpec& sponge)
{
    const int n_main = std::max(1, int(std::lround(2.0 * half_width / h_main)));
    std::vector<double> x;
    for (int i = 0; i <= n_main; ++i)
        x.push_back(-half_width + 2.0 * half_width * i / n_main);
    if (sponge.enabled()) {
        // element size relaxed from 1.5 to 1.0 elements per wavelength
        const double h_sp = 1.5 * (2.0 * half_width / n_main);
        const int n_sp = std::max(1, int(std::ceil(sponge.thickness / h_sp)));
        std::vector<double> right;
        for (int i = 1; i <= n_sp; ++i)
            right.push_back(half_width + sponge.thickness * i / n_sp);
        for (auto it = right.rbegin(); it != right.rend(); ++it)
            x.insert(x.begin(), -*it);
        for (double v : right) x.push_back(v);
    }
    return x;
}

inline int snap_plane(const std::vector<double>& planes, double v)
{
    int best = 0;
    for (std::size_t i = 1; i < planes.size(); ++i)
        if (std::abs(planes[i] - v) < std::abs(planes[best] - v))
            best = int(i);
    return best;
}

} // namespace detail

/// Structured cube-to-six-tets mesh of [-half_width, half_width]^3, with an
/// optional sponge extension, impenetrable scatterer boxes removed (faces
/// snapped to the nearest grid planes) and their exposed surfaces tagged.
///
/// Grid stretching is applied to vertex coordinates before any geometric
/// factors are computed.
inline Mesh build_box_mesh(double half_width, double target_h,
                           const std::vector<Box>& scatterer_boxes,
                           const SpongeSpec& sponge_in = {},
                           BoundaryTag scatterer_tag = BoundaryTag::PEC,
                           BoundaryTag outer_tag = BoundaryTag::SilverMuller)
{
    if (target_h <= 0.0) throw std::invalid_argument("target_h must be > 0");
    for (const auto& b : scatterer_boxes) {
        if ((b.lo.array() >= b.hi.array()).any())
            throw std::invalid_argument("degenerate scatterer box");
        if (b.lo.minCoeff() <= -half_width || b.hi.maxCoeff() >= half_width)
            throw std::invalid_argument("scatterer outside domain");
        if (target_h > b.min_edge() + 1e-12)
            throw std::invalid_argument(
                "target_h larger than smallest scatterer edge");
    }

    SpongeSpec sponge = sponge_in;
    sponge.start = half_width;

    const auto planes = detail::axis_planes(half_width, target_h, sponge);
    const int nv = int(planes.size());
    const int nc = nv - 1;

    // snap scatterer boxes to the grid
    std::vector<std::array<int, 6>> snapped; // ilo..klo, ihi..khi
    for (const auto& b : scatterer_boxes) {
        std::array<int, 6> s;
        for (int d = 0; d < 3; ++d) {
            s[d] = detail::snap_plane(planes, b.lo(d));
            s[3 + d] = detail::snap_plane(planes, b.hi(d));
            if (s[3 + d] <= s[d])
                throw std::invalid_argument(
                    "geometry unresolvable: scatterer box snaps to empty");
        }
        snapped.push_back(s);
    }

    Mesh mesh;
    // vertices with grid stretching applied
    auto stretched = [&](double v) {
        return std::copysign(stretch_coordinate(std::abs(v), sponge), v);
    };
    std::vector<int> vid(std::size_t(nv) * nv * nv);
    for (int i = 0; i < nv; ++i)
        for (int j = 0; j < nv; ++j)
            for (int k = 0; k < nv; ++k) {
                vid[(std::size_t(i) * nv + j) * nv + k] =
                    int(mesh.vertices.size());
                mesh.vertices.emplace_back(stretched(planes[i]),
                                           stretched(planes[j]),
                                           stretched(planes[k]));
            }
    auto vat = [&](int i, int j, int k) {
        return vid[(std::size_t(i) * nv + j) * nv + k];
    };

    auto cell_removed = [&](int i, int j, int k) {
        for (const auto& s : snapped)
            if (i >= s[0] && i < s[3] && j >= s[1] && j < s[4] && k >= s[2] &&
                k < s[5])
                return true;
        return false;
    };

    // Kuhn six-tet split around the (0,0,0)-(1,1,1) cell diagonal; face
    // diagonals agree between adjacent cells.
    static const int split[6][4][3] = {
        {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {1, 1, 1}},
        {{0, 0, 0}, {1, 1, 0}, {0, 1, 0}, {1, 1, 1}},
        {{0, 0, 0}, {0, 1, 0}, {0, 1, 1}, {1, 1, 1}},
        {{0, 0, 0}, {0, 1, 1}, {0, 0, 1}, {1, 1, 1}},
        {{0, 0, 0}, {0, 0, 1}, {1, 0, 1}, {1, 1, 1}},
        {{0, 0, 0}, {1, 0, 1}, {1, 0, 0}, {1, 1, 1}}};

    for (int i = 0; i < nc; ++i)
        for (int j = 0; j < nc; ++j)
            for (int k = 0; k < nc; ++k) {
                if (cell_removed(i, j, k)) continue;
                const bool in_sponge =
                    sponge.enabled() &&
                    (std::max({std::abs(0.5 * (planes[i] + planes[i + 1])),
                               std::abs(0.5 * (planes[j] + planes[j + 1])),
                               std::abs(0.5 * (planes[k] + planes[k + 1]))}) >
                     half_width);
                for (int tt = 0; tt < 6; ++tt) {
                    std::array<int, 4> tet;
                    for (int m = 0; m < 4; ++m)
                        tet[m] = vat(i + split[tt][m][0], j + split[tt][m][1],
                                     k + split[tt][m][2]);
                    mesh.tets.push_back(tet);
                    if (mesh.signed_volume(mesh.num_elements() - 1) < 0.0)
                        std::swap(mesh.tets.back()[2], mesh.tets.back()[3]);
                    mesh.element_region.push_back(in_sponge ? Region::Sponge
                                                            : Region::Main);
                }
            }

    // tag exterior faces: faces appearing once are either the outer boundary
    // or an exposed scatterer surface
    std::map<std::array<int, 3>, int> face_count;
    for (int e = 0; e < mesh.num_elements(); ++e)
        for (int f = 0; f < 4; ++f) face_count[mesh.face_key(e, f)]++;

    const double outer = sponge.enabled()
                             ? stretch_coordinate(half_width + sponge.thickness,
                                                  sponge)
                             : half_width;
    for (int e = 0; e < mesh.num_elements(); ++e)
        for (int f = 0; f < 4; ++f) {
            const auto key = mesh.face_key(e, f);
            if (face_count[key] != 1) continue;
            const auto fv = Mesh::face_vertex_ids(f);
            Vec3 c = Vec3::Zero();
            for (int m = 0; m < 3; ++m)
                c += mesh.vertices[mesh.tets[e][fv[m]]];
            c /= 3.0;
            const bool on_outer = (c.cwiseAbs().maxCoeff() > outer - 1e-9);
            mesh.boundary_tags[key] = on_outer ? outer_tag : scatterer_tag;
            if (!on_outer) mesh.scatterer_faces.insert(key);
        }

    return mesh;
}

} // namespace tdlsm

#endif
