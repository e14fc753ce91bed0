#include "tdlsm/geometry.hpp"
#include "tdlsm/mesh.hpp"
#include "tdlsm/sponge.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace tdlsm;

TEST_CASE("unit cube at h=1 splits into six tets")
{
    Mesh mesh = build_box_mesh(0.5, 1.0, {});
    REQUIRE(mesh.num_elements() == 6);
    for (int e = 0; e < 6; ++e) REQUIRE(mesh.signed_volume(e) > 0.0);
    double vol = 0.0;
    for (int e = 0; e < 6; ++e) vol += mesh.signed_volume(e);
    REQUIRE(vol == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("empty scatterer list yields a full cube with outer tags only")
{
    Mesh mesh = build_box_mesh(1.0, 0.5, {});
    for (const auto& [key, tag] : mesh.boundary_tags)
        REQUIRE(tag == BoundaryTag::SilverMuller);
    REQUIRE(!mesh.boundary_tags.empty());
}

TEST_CASE("scatterer faces land exactly on element faces")
{
    Box cube{{0.25, 0.25, 0.25}, {0.75, 0.75, 0.75}};
    Mesh mesh = build_box_mesh(4.1, 0.25, {cube}, {}, BoundaryTag::Impedance);
    int n_imp = 0;
    for (const auto& [key, tag] : mesh.boundary_tags) {
        if (tag != BoundaryTag::Impedance) continue;
        ++n_imp;
        // each tagged face is planar on one axis plane of the snapped cube
        bool planar = false;
        for (int d = 0; d < 3; ++d) {
            const double c0 = mesh.vertices[key[0]](d);
            if (std::abs(mesh.vertices[key[1]](d) - c0) < 1e-12 &&
                std::abs(mesh.vertices[key[2]](d) - c0) < 1e-12)
                planar = true;
        }
        REQUIRE(planar);
    }
    REQUIRE(n_imp > 0);
}

TEST_CASE("scatterer geometry preconditions are enforced")
{
    Box outside{{3.9, 3.9, 3.9}, {4.5, 4.5, 4.5}};
    REQUIRE_THROWS_AS(build_box_mesh(4.1, 0.25, {outside}),
                      std::invalid_argument);
    Box tiny{{0.0, 0.0, 0.0}, {0.1, 0.1, 0.1}};
    REQUIRE_THROWS_AS(build_box_mesh(4.1, 0.25, {tiny}),
                      std::invalid_argument);
}

TEST_CASE("single-tet geometric factors")
{
    Mesh mesh;
    mesh.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    mesh.tets = {{0, 1, 2, 3}};
    mesh.element_region = {Region::Main};
    for (int f = 0; f < 4; ++f)
        mesh.boundary_tags[mesh.face_key(0, f)] = BoundaryTag::PEC;
    GeomFactors geo = connect_and_factors(mesh);

    REQUIRE(geo.volume(0) == Catch::Approx(1.0 / 6.0).epsilon(1e-12));
    const Vec3 expected[4] = {{0, 0, -1},
                              {0, -1, 0},
                              Vec3{1, 1, 1}.normalized(),
                              {-1, 0, 0}};
    for (int f = 0; f < 4; ++f) {
        REQUIRE((geo.normal[0][f] - expected[f]).norm() < 1e-12);
        REQUIRE(geo.normal[0][f].norm() == Catch::Approx(1.0));
    }
}

TEST_CASE("interior faces pair up with opposite normals")
{
    Mesh mesh = build_box_mesh(1.0, 0.5, {});
    GeomFactors geo = connect_and_factors(mesh);
    for (int e = 0; e < mesh.num_elements(); ++e)
        for (int f = 0; f < 4; ++f) {
            const auto& nb = mesh.face_neighbors[e][f];
            if (!nb.interior()) continue;
            const auto& back = mesh.face_neighbors[nb.elem][nb.face];
            REQUIRE(back.elem == e);
            REQUIRE(back.face == f);
            REQUIRE((geo.normal[e][f] + geo.normal[nb.elem][nb.face]).norm() <
                    1e-12);
        }
}

TEST_CASE("geometric factors scale correctly under uniform dilation")
{
    Mesh mesh = build_box_mesh(1.0, 0.5, {});
    Mesh big = mesh;
    for (auto& v : big.vertices) v *= 2.0;
    GeomFactors g1 = connect_and_factors(mesh);
    GeomFactors g2 = connect_and_factors(big);
    for (int e = 0; e < mesh.num_elements(); ++e) {
        REQUIRE(g2.jac[e] == Catch::Approx(8.0 * g1.jac[e]).epsilon(1e-12));
        for (int f = 0; f < 4; ++f) {
            REQUIRE(g2.sjac[e][f] ==
                    Catch::Approx(4.0 * g1.sjac[e][f]).epsilon(1e-12));
            REQUIRE((g2.normal[e][f] - g1.normal[e][f]).norm() < 1e-12);
        }
    }
}

TEST_CASE("stretch_coordinate endpoints and monotonicity")
{
    SpongeSpec sp;
    sp.start = 4.1;
    sp.thickness = 6.0;
    sp.g_max = 0.2;
    REQUIRE(stretch_coordinate(4.1, sp) == Catch::Approx(4.1));
    REQUIRE(stretch_coordinate(4.1 + 6.0, sp) ==
            Catch::Approx(4.1 + 1.2 * 6.0).epsilon(1e-12));
    REQUIRE(stretch_coordinate(2.0, sp) == Catch::Approx(2.0));

    SpongeSpec flat = sp;
    flat.g_max = 0.0;
    for (double x = 4.1; x <= 10.1; x += 0.5)
        REQUIRE(stretch_coordinate(x, flat) == Catch::Approx(x));

    double prev = stretch_coordinate(4.1, sp);
    for (double x = 4.15; x <= 10.1; x += 0.05) {
        const double cur = stretch_coordinate(x, sp);
        REQUIRE(cur > prev);
        prev = cur;
    }
}

TEST_CASE("sponge damping profile")
{
    SpongeSpec sp;
    sp.start = 4.1;
    sp.thickness = 6.0;
    sp.beta_max = 10.0;
    sp.g_max = 0.2;
    const double lend = 4.1 + 6.0 * 1.2;
    REQUIRE(sponge_beta(4.1, sp) == Catch::Approx(0.0).margin(1e-15));
    REQUIRE(sponge_beta(lend, sp) == Catch::Approx(10.0).epsilon(1e-12));
    REQUIRE(sponge_beta(4.1 + (lend - 4.1) / 2.0, sp) ==
            Catch::Approx(10.0 / 8.0).epsilon(1e-12));
    // multi-axis combination takes the maximum over axes
    REQUIRE(sponge_beta3({lend, lend, 0.0}, sp) ==
            Catch::Approx(10.0).epsilon(1e-12));
    // continuity at the interface
    REQUIRE(sponge_beta3({4.1 + 1e-9, 0.0, 0.0}, sp) < 1e-6);
}
