#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "bdie/errors.hpp"
#include "bdie/mesh.hpp"

using namespace bdie;

namespace {

double gauss_defect(const SurfaceMesh& s) {
    Vec3 sum = Vec3::Zero();
    for (int j = 0; j < s.panel_count(); ++j) sum += s.areas[j] * s.normals[j];
    return sum.norm() / s.total_area();
}

// every tet face must be shared by at most two cells; faces seen once are
// boundary faces and must biject onto the panels
void check_face_conformity(const MeshPair& mp) {
    std::map<std::array<int, 3>, int> count;
    static const int tf[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
    for (int c = 0; c < mp.volume.cell_count(); ++c)
        for (const auto& f : tf) {
            std::array<int, 3> key{mp.volume.cells[c][f[0]], mp.volume.cells[c][f[1]],
                                   mp.volume.cells[c][f[2]]};
            std::sort(key.begin(), key.end());
            count[key]++;
        }
    int boundary = 0;
    for (const auto& [key, n] : count) {
        REQUIRE(n <= 2);
        if (n == 1) ++boundary;
    }
    CHECK(boundary == mp.surface.panel_count());
}

} // namespace

TEST_CASE("icosphere refinement 0: 20 panels, closed-form icosahedron area") {
    const MeshPair mp = build_ball_mesh(1.0, 0);
    CHECK(mp.surface.panel_count() == 20);
    const double edge = 1.0 / std::sin(2.0 * pi / 5.0);
    const double area_oracle = 5.0 * std::sqrt(3.0) * edge * edge;
    CHECK(mp.surface.total_area() == doctest::Approx(area_oracle).epsilon(1e-12));
}

TEST_CASE("icosphere refinement 2: 320 panels, area within 2% of the sphere") {
    const MeshPair mp = build_ball_mesh(1.0, 2);
    CHECK(mp.surface.panel_count() == 320);
    CHECK(std::abs(mp.surface.total_area() - 4.0 * pi) / (4.0 * pi) < 0.02);
}

TEST_CASE("discrete Gauss identity: sum of area*n vanishes") {
    for (int r = 0; r <= 2; ++r) CHECK(gauss_defect(build_ball_mesh(1.0, r).surface) < 1e-10);
    CHECK(gauss_defect(build_ball_mesh(2.5, 1).surface) < 1e-10);
    for (int n : {1, 2, 3}) CHECK(gauss_defect(build_cube_mesh(1.0, n).surface) < 1e-10);
}

TEST_CASE("ball volume converges to 4pi/3 at order >= 1.5, monotonically") {
    // Note: the inscribed polyhedron is 3.4% small at refinement 2; the 1%
    // mark is reached at refinement 3 (see the convergence order instead).
    const double exact = 4.0 * pi / 3.0;
    double prev_err = -1.0;
    std::vector<double> errs;
    for (int r = 0; r <= 3; ++r) {
        const MeshPair mp = build_ball_mesh(1.0, r);
        const double err = std::abs(mp.volume.total_volume() - exact) / exact;
        errs.push_back(err);
        if (prev_err > 0.0) CHECK(err < prev_err);
        prev_err = err;
    }
    for (std::size_t i = 0; i + 1 < errs.size(); ++i)
        CHECK(errs[i] / errs[i + 1] >= std::pow(2.0, 1.5));
    CHECK(errs.back() < 0.01);
}

TEST_CASE("ball prism layering is conforming and matches the panel count") {
    for (int r = 0; r <= 2; ++r) {
        const MeshPair mp = build_ball_mesh(1.0, r);
        CHECK(mp.volume.cell_count() ==
              mp.surface.panel_count() * (3 * ((1 << r) + 1 - 1) + 1));
        check_face_conformity(mp);
    }
}

TEST_CASE("boundary_link bijection with coinciding coordinates") {
    for (const MeshPair& mp : {build_ball_mesh(1.0, 1), build_cube_mesh(1.0, 2)}) {
        REQUIRE(static_cast<int>(mp.volume.boundary_link.size()) == mp.surface.panel_count());
        std::vector<char> seen(mp.surface.panel_count(), 0);
        for (const auto& face : mp.volume.boundary_link) {
            REQUIRE_FALSE(seen[face.panel]);
            seen[face.panel] = 1;
            const auto pv = mp.surface.panel_vertices(face.panel);
            for (int i = 0; i < 3; ++i) {
                const Vec3& a = mp.volume.nodes[face.nodes[i]];
                double best = 1e300;
                for (const Vec3& b : pv) best = std::min(best, (a - b).norm());
                CHECK(best <= 1e-12);
            }
        }
    }
}

TEST_CASE("cube meshes are exact") {
    const MeshPair one = build_cube_mesh(1.0, 1);
    CHECK(one.volume.cell_count() == 6);
    CHECK(one.volume.total_volume() == doctest::Approx(8.0).epsilon(1e-13));

    const MeshPair two = build_cube_mesh(1.0, 2);
    CHECK(two.surface.panel_count() == 12 * 4);
    CHECK(two.surface.total_area() == doctest::Approx(24.0).epsilon(1e-13));
    check_face_conformity(two);

    const MeshPair half = build_cube_mesh(0.5, 2);
    CHECK(half.volume.total_volume() == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("mesh statistics") {
    const MeshPair r0 = build_ball_mesh(1.0, 0);
    const MeshPair r1 = build_ball_mesh(1.0, 1);
    const MeshStatistics s0 = mesh_statistics(r0.surface, r0.volume);
    const MeshStatistics s1 = mesh_statistics(r1.surface, r1.volume);
    const double ratio = s1.h_surface / s0.h_surface;
    CHECK(ratio > 0.4);
    CHECK(ratio < 0.6);
    CHECK(s0.min_quality > 0.0);

    const MeshPair c2 = build_cube_mesh(1.0, 2);
    CHECK(mesh_statistics(c2.surface, c2.volume).h_volume ==
          doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));

    // degenerate cell (repeated vertex) is flagged with quality 0
    VolumeMesh degenerate;
    degenerate.nodes = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    degenerate.cells = {{0, 1, 2, 0}};
    degenerate.barycenters = {Vec3::Zero()};
    degenerate.volumes = {0.0};
    CHECK(mesh_statistics(c2.surface, degenerate).min_quality == 0.0);
}

TEST_CASE("size caps") {
    CHECK_THROWS_AS(build_ball_mesh(1.0, 7), ConfigError);
    CHECK_THROWS_AS(build_cube_mesh(1.0, 25), ConfigError);
    CHECK_THROWS_AS(build_ball_mesh(-1.0, 1), ConfigError);
    CHECK_THROWS_AS(build_cube_mesh(0.0, 2), ConfigError);
}

TEST_CASE("export/import round-trips bitwise") {
    const MeshPair mp = build_ball_mesh(1.0, 1);
    const std::string path = "mesh_roundtrip.txt";
    export_mesh(mp.surface, mp.volume, path);
    const MeshPair back = import_mesh(path);

    REQUIRE(back.surface.vertices.size() == mp.surface.vertices.size());
    for (std::size_t i = 0; i < mp.surface.vertices.size(); ++i)
        for (int k = 0; k < 3; ++k) CHECK(back.surface.vertices[i][k] == mp.surface.vertices[i][k]);
    REQUIRE(back.volume.cells.size() == mp.volume.cells.size());
    for (std::size_t c = 0; c < mp.volume.cells.size(); ++c) {
        CHECK(back.volume.cells[c] == mp.volume.cells[c]);
        CHECK(back.volume.volumes[c] == mp.volume.volumes[c]);
    }
    CHECK(back.volume.boundary_link.size() == mp.volume.boundary_link.size());
    std::remove(path.c_str());
}

TEST_CASE("import rejects bad files") {
    const MeshPair mp = build_ball_mesh(1.0, 0);
    const std::string path = "mesh_bad.txt";

    // non-unit normal
    export_mesh(mp.surface, mp.volume, path);
    {
        std::ifstream in(path);
        std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        in.close();
        // scale the first normal: panels section lines end with the normal triple
        SurfaceMesh broken = mp.surface;
        broken.normals[0] *= 2.0;
        export_mesh(broken, mp.volume, path);
        CHECK_THROWS_AS(import_mesh(path), MeshIoError);
    }

    // truncated file: error names the missing section
    export_mesh(mp.surface, mp.volume, path);
    {
        std::ifstream in(path);
        std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        in.close();
        const auto cut = all.find("CELLS");
        std::ofstream out(path);
        out << all.substr(0, cut);
    }
    try {
        import_mesh(path);
        FAIL("expected MeshIoError");
    } catch (const MeshIoError& e) {
        CHECK(std::string(e.what()).find("CELLS") != std::string::npos);
    }
    std::remove(path.c_str());
}

TEST_CASE("point-triangle distance") {
    const Vec3 a{0, 0, 0}, b{1, 0, 0}, c{0, 1, 0};
    CHECK(point_triangle_distance({0.2, 0.2, 0.5}, a, b, c) == doctest::Approx(0.5));
    CHECK(point_triangle_distance({-1, -1, 0}, a, b, c) == doctest::Approx(std::sqrt(2.0)));
    CHECK(point_triangle_distance({2, 0, 0}, a, b, c) == doctest::Approx(1.0));
    CHECK(point_triangle_distance({0.1, 0.1, 0}, a, b, c) == doctest::Approx(0.0));
}
