#include "bdie/mesh.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "bdie/errors.hpp"

namespace bdie {

namespace {

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
    return 0.5 * (b - a).cross(c - a).norm();
}

double tet_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    return std::abs((b - a).cross(c - a).dot(d - a)) / 6.0;
}

} // namespace

double SurfaceMesh::panel_diameter(int j) const {
    const auto v = panel_vertices(j);
    return std::max({(v[1] - v[0]).norm(), (v[2] - v[1]).norm(), (v[0] - v[2]).norm()});
}

double SurfaceMesh::total_area() const {
    double s = 0.0;
    for (double a : areas) s += a;
    return s;
}

Box SurfaceMesh::bounding_box() const {
    Box box;
    box.lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    box.hi = -box.lo;
    for (const Vec3& v : vertices) {
        box.lo = box.lo.cwiseMin(v);
        box.hi = box.hi.cwiseMax(v);
    }
    return box;
}

void SurfaceMesh::compute_panel_data(const Vec3& interior_point) {
    const int m = panel_count();
    centroids.resize(m);
    areas.resize(m);
    normals.resize(m);
    for (int j = 0; j < m; ++j) {
        const auto v = panel_vertices(j);
        centroids[j] = (v[0] + v[1] + v[2]) / 3.0;
        Vec3 n = (v[1] - v[0]).cross(v[2] - v[0]);
        areas[j] = 0.5 * n.norm();
        if (areas[j] <= 0.0) throw AssemblyError("degenerate surface panel");
        n /= n.norm();
        if (n.dot(centroids[j] - interior_point) < 0.0) {
            std::swap(panels[j][1], panels[j][2]);
            n = -n;
        }
        normals[j] = n;
    }
}

double VolumeMesh::cell_diameter(int c) const {
    const auto v = cell_vertices(c);
    double d = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) d = std::max(d, (v[j] - v[i]).norm());
    return d;
}

double VolumeMesh::total_volume() const {
    double s = 0.0;
    for (double v : volumes) s += v;
    return s;
}

void VolumeMesh::compute_cell_data() {
    const int q = cell_count();
    barycenters.resize(q);
    volumes.resize(q);
    for (int c = 0; c < q; ++c) {
        const auto v = cell_vertices(c);
        barycenters[c] = (v[0] + v[1] + v[2] + v[3]) / 4.0;
        volumes[c] = tet_volume(v[0], v[1], v[2], v[3]);
    }
}

bool DomainGeometry::contains(const Vec3& x) const {
    const Vec3 d = x - center;
    if (kind == Kind::ball) return d.norm() < size;
    return d.cwiseAbs().maxCoeff() < size;
}

double DomainGeometry::volume() const {
    if (kind == Kind::ball) return 4.0 / 3.0 * pi * size * size * size;
    const double w = 2.0 * size;
    return w * w * w;
}

// ---------------------------------------------------------------------------
// ball

namespace {

struct TriMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;
};

TriMesh icosahedron() {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    TriMesh m;
    m.vertices = {
        {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
        {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
        {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1},
    };
    for (Vec3& v : m.vertices) v.normalize();
    m.faces = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
        {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
        {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1},
    };
    return m;
}

TriMesh subdivide_projected(const TriMesh& in) {
    TriMesh out;
    out.vertices = in.vertices;
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int i, int j) {
        const auto key = std::minmax(i, j);
        auto it = midpoint.find(key);
        if (it != midpoint.end()) return it->second;
        Vec3 m = (out.vertices[i] + out.vertices[j]) / 2.0;
        m.normalize();
        out.vertices.push_back(m);
        const int id = static_cast<int>(out.vertices.size()) - 1;
        midpoint.emplace(key, id);
        return id;
    };
    for (const auto& f : in.faces) {
        const int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
        out.faces.push_back({f[0], ab, ca});
        out.faces.push_back({f[1], bc, ab});
        out.faces.push_back({f[2], ca, bc});
        out.faces.push_back({ab, bc, ca});
    }
    return out;
}

} // namespace

MeshPair build_ball_mesh(double radius, int refinement) {
    if (radius <= 0.0) throw ConfigError("ball radius must be positive");
    if (refinement < 0) throw ConfigError("refinement must be >= 0");
    if (refinement > 6) throw ConfigError("ball refinement > 6 exceeds desk scale");

    TriMesh tri = icosahedron();
    for (int r = 0; r < refinement; ++r) tri = subdivide_projected(tri);

    MeshPair mp;
    mp.geometry = {DomainGeometry::Kind::ball, radius, Vec3::Zero()};

    SurfaceMesh& s = mp.surface;
    s.vertices.reserve(tri.vertices.size());
    for (const Vec3& v : tri.vertices) s.vertices.push_back(v * radius);
    s.panels = tri.faces;
    s.compute_panel_data(Vec3::Zero());

    // Radial layering: K concentric copies of the surface triangulation at
    // scales (K-k)/K, prisms between consecutive copies split into 3 tets,
    // innermost copy coned to the center.
    const int K = (1 << refinement) + 1;
    const int nv = static_cast<int>(s.vertices.size());

    VolumeMesh& vol = mp.volume;
    vol.nodes = s.vertices; // copy 0 shares boundary coordinates bitwise
    for (int k = 1; k < K; ++k) {
        const double scale = double(K - k) / double(K);
        for (int i = 0; i < nv; ++i) vol.nodes.push_back(s.vertices[i] * scale);
    }
    const int center = static_cast<int>(vol.nodes.size());
    vol.nodes.push_back(Vec3::Zero());

    for (int p = 0; p < s.panel_count(); ++p) {
        // sort the panel's vertex ids so prism diagonals agree across panels
        std::array<int, 3> g = s.panels[p];
        std::sort(g.begin(), g.end());
        for (int k = 0; k + 1 < K; ++k) {
            const int o = k * nv, q = (k + 1) * nv;
            const std::array<int, 3> a{g[0] + o, g[1] + o, g[2] + o};
            const std::array<int, 3> b{g[0] + q, g[1] + q, g[2] + q};
            vol.cells.push_back({a[0], a[1], a[2], b[0]});
            vol.cells.push_back({a[1], a[2], b[0], b[1]});
            vol.cells.push_back({a[2], b[0], b[1], b[2]});
        }
        const int o = (K - 1) * nv;
        vol.cells.push_back({g[0] + o, g[1] + o, g[2] + o, center});
        vol.boundary_link.push_back({{s.panels[p][0], s.panels[p][1], s.panels[p][2]}, p});
    }
    vol.compute_cell_data();
    return mp;
}

// ---------------------------------------------------------------------------
// cube

MeshPair build_cube_mesh(double half_width, int n) {
    if (half_width <= 0.0) throw ConfigError("cube half-width must be positive");
    if (n < 1) throw ConfigError("cube subdivision must be >= 1");
    if (n > 24) throw ConfigError("cube subdivision > 24 exceeds desk scale");

    MeshPair mp;
    mp.geometry = {DomainGeometry::Kind::cube, half_width, Vec3::Zero()};

    VolumeMesh& vol = mp.volume;
    const int m = n + 1;
    auto node_id = [&](int i, int j, int k) { return (i * m + j) * m + k; };
    const double h = 2.0 * half_width / n;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k)
                vol.nodes.push_back(
                    {-half_width + i * h, -half_width + j * h, -half_width + k * h});

    // Kuhn split: 6 tets per hex sharing the main diagonal; conforming
    // across cells by translation.
    static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                    {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const int base[3] = {i, j, k};
                for (const auto& perm : perms) {
                    std::array<int, 4> tet;
                    int c[3] = {base[0], base[1], base[2]};
                    tet[0] = node_id(c[0], c[1], c[2]);
                    for (int step = 0; step < 3; ++step) {
                        ++c[perm[step]];
                        tet[step + 1] = node_id(c[0], c[1], c[2]);
                    }
                    vol.cells.push_back(tet);
                }
            }
    vol.compute_cell_data();

    // Boundary faces: tet faces appearing exactly once, oriented outward.
    std::map<std::array<int, 3>, std::pair<int, std::array<int, 3>>> face_count;
    static const int tet_faces[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
    for (int c = 0; c < vol.cell_count(); ++c)
        for (const auto& tf : tet_faces) {
            std::array<int, 3> f{vol.cells[c][tf[0]], vol.cells[c][tf[1]], vol.cells[c][tf[2]]};
            std::array<int, 3> key = f;
            std::sort(key.begin(), key.end());
            auto it = face_count.find(key);
            if (it == face_count.end())
                face_count.emplace(key, std::make_pair(1, f));
            else
                it->second.first++;
        }

    // Surface vertices are the boundary subset of the volume nodes, compacted
    // (map iteration over sorted keys keeps panel numbering deterministic).
    SurfaceMesh& s = mp.surface;
    std::map<int, int> node_to_vertex;
    for (const auto& [key, entry] : face_count) {
        if (entry.first != 1) continue;
        std::array<int, 3> panel;
        for (int i = 0; i < 3; ++i) {
            const int node = entry.second[i];
            auto it = node_to_vertex.find(node);
            if (it == node_to_vertex.end()) {
                it = node_to_vertex.emplace(node, static_cast<int>(s.vertices.size())).first;
                s.vertices.push_back(vol.nodes[node]);
            }
            panel[i] = it->second;
        }
        vol.boundary_link.push_back({entry.second, s.panel_count()});
        s.panels.push_back(panel);
    }
    s.compute_panel_data(Vec3::Zero());
    return mp;
}

// ---------------------------------------------------------------------------
// statistics

namespace {

double tet_quality(const std::array<Vec3, 4>& v) {
    const double vol = tet_volume(v[0], v[1], v[2], v[3]);
    if (vol <= 0.0) return 0.0;
    double face_area = triangle_area(v[1], v[2], v[3]) + triangle_area(v[0], v[2], v[3]) +
                       triangle_area(v[0], v[1], v[3]) + triangle_area(v[0], v[1], v[2]);
    const double inradius = 3.0 * vol / face_area;
    // circumcenter from |x-v0|^2 = |x-vi|^2
    Eigen::Matrix3d A;
    Vec3 rhs;
    for (int i = 0; i < 3; ++i) {
        A.row(i) = 2.0 * (v[i + 1] - v[0]).transpose();
        rhs[i] = v[i + 1].squaredNorm() - v[0].squaredNorm();
    }
    const double det = A.determinant();
    if (std::abs(det) < 1e-300) return 0.0;
    const Vec3 cc = A.partialPivLu().solve(rhs);
    const double circumradius = (cc - v[0]).norm();
    if (circumradius <= 0.0) return 0.0;
    return inradius / circumradius;
}

} // namespace

MeshStatistics mesh_statistics(const SurfaceMesh& surface, const VolumeMesh& volume) {
    MeshStatistics st;
    st.n_panels = surface.panel_count();
    st.n_cells = volume.cell_count();
    for (int j = 0; j < st.n_panels; ++j)
        st.h_surface = std::max(st.h_surface, surface.panel_diameter(j));
    st.min_quality = st.n_cells > 0 ? 1.0 : 0.0;
    for (int c = 0; c < st.n_cells; ++c) {
        st.h_volume = std::max(st.h_volume, volume.cell_diameter(c));
        st.min_quality = std::min(st.min_quality, tet_quality(volume.cell_vertices(c)));
    }
    return st;
}

double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    // Ericson, Real-Time Collision Detection, closest point on triangle.
    const Vec3 ab = b - a, ac = c - a, ap = p - a;
    const double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0.0 && d2 <= 0.0) return (p - a).norm();
    const Vec3 bp = p - b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0.0 && d4 <= d3) return (p - b).norm();
    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return (p - (a + ab * (d1 / (d1 - d3)))).norm();
    const Vec3 cp = p - c;
    const double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0.0 && d5 <= d6) return (p - c).norm();
    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return (p - (a + ac * (d2 / (d2 - d6)))).norm();
    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
        const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (p - (b + (c - b) * w)).norm();
    }
    const double denom = 1.0 / (va + vb + vc);
    return (p - (a + ab * (vb * denom) + ac * (vc * denom))).norm();
}

double distance_to_boundary(const SurfaceMesh& surface, const Vec3& p) {
    double d = std::numeric_limits<double>::infinity();
    for (int j = 0; j < surface.panel_count(); ++j) {
        const auto v = surface.panel_vertices(j);
        d = std::min(d, point_triangle_distance(p, v[0], v[1], v[2]));
    }
    return d;
}

} // namespace bdie
