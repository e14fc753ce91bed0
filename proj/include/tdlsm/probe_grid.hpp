#ifndef TDLSM_PROBE_GRID_HPP
#define TDLSM_PROBE_GRID_HPP

#include "tdlsm/math.hpp"

#include <stdexcept>
#include <vector>

namespace tdlsm {

enum class GridRole { Source, Measurement };

/// Cell-centered point grid on the surface of a cube, with an orthonormal
/// tangent frame per point. Source grids carry quadrature weights.
struct ProbeGrid {
    std::vector<Vec3> points;
    std::vector<Vec3> normals;
    std::vector<Vec3> tangent1;
    std::vector<Vec3> tangent2;
    std::vector<double> weights; ///< area weights; zero for measurement role
    double half_width = 0.0;
    int per_face_n = 0;

    int size() const { return int(points.size()); }
};

/// Uniform per_face_n x per_face_n cell-centered grid on each of the six
/// faces of the cube of the given half width. Tangent frames are
/// axis-aligned on each face; source role gets the uniform quadrature
/// weight face_area / per_face_n^2 per point.
inline ProbeGrid build_probe_grid(int per_face_n, double cube_half_width,
                                  GridRole role)
{
    if (per_face_n < 1) throw std::invalid_argument("per_face_n must be >= 1");
    ProbeGrid g;
    g.half_width = cube_half_width;
    g.per_face_n = per_face_n;

    const double w = cube_half_width;
    const double face_area = 4.0 * w * w;
    const double weight =
        (role == GridRole::Source)
            ? face_area / double(per_face_n) / double(per_face_n)
            : 0.0;

    // faces: +-x, +-y, +-z; tangents are the remaining axes in cyclic order
    for (int axis = 0; axis < 3; ++axis)
        for (int side = 0; side < 2; ++side) {
            const double sgn = side == 0 ? 1.0 : -1.0;
            Vec3 nu = Vec3::Zero();
            nu(axis) = sgn;
            Vec3 t1 = Vec3::Zero();
            t1((axis + 1) % 3) = 1.0;
            Vec3 t2 = nu.cross(t1);
            for (int i = 0; i < per_face_n; ++i)
                for (int j = 0; j < per_face_n; ++j) {
                    const double u = -w + (2.0 * i + 1.0) * w / per_face_n;
                    const double v = -w + (2.0 * j + 1.0) * w / per_face_n;
                    Vec3 p;
                    p(axis) = sgn * w;
                    p((axis + 1) % 3) = u;
                    p((axis + 2) % 3) = v;
                    g.points.push_back(p);
                    g.normals.push_back(nu);
                    g.tangent1.push_back(t1);
                    g.tangent2.push_back(t2);
                    g.weights.push_back(weight);
                }
        }
    return g;
}

} // namespace tdlsm

#endif
