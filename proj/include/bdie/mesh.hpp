#ifndef BDIE_MESH_HPP
#define BDIE_MESH_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "bdie/types.hpp"

namespace bdie {

/// Triangulated closed boundary. Panels are flat; derived per-panel data
/// (centroid, area, outward unit normal) is stored, not recomputed.
struct SurfaceMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> panels;
    std::vector<Vec3> centroids;
    std::vector<double> areas;
    std::vector<Vec3> normals;

    int panel_count() const { return static_cast<int>(panels.size()); }
    std::array<Vec3, 3> panel_vertices(int j) const {
        return {vertices[panels[j][0]], vertices[panels[j][1]], vertices[panels[j][2]]};
    }
    double panel_diameter(int j) const;
    double total_area() const;
    Box bounding_box() const;

    /// Recomputes centroid/area/normal from vertices, orienting normals
    /// away from the given interior point.
    void compute_panel_data(const Vec3& interior_point);
};

/// Tetrahedral decomposition of the domain. Boundary faces coincide with
/// surface panels; boundary_link maps each such face to its panel index.
struct VolumeMesh {
    std::vector<Vec3> nodes;
    std::vector<std::array<int, 4>> cells;
    std::vector<Vec3> barycenters;
    std::vector<double> volumes;

    struct BoundaryFace {
        std::array<int, 3> nodes; // volume-mesh node ids
        int panel;                // surface panel index
    };
    std::vector<BoundaryFace> boundary_link;

    int cell_count() const { return static_cast<int>(cells.size()); }
    std::array<Vec3, 4> cell_vertices(int c) const {
        return {nodes[cells[c][0]], nodes[cells[c][1]], nodes[cells[c][2]], nodes[cells[c][3]]};
    }
    double cell_diameter(int c) const;
    double total_volume() const;

    void compute_cell_data();
};

struct DomainGeometry {
    enum class Kind { ball, cube };
    Kind kind = Kind::ball;
    double size = 1.0; // radius or half-width
    Vec3 center{0, 0, 0};

    bool contains(const Vec3& x) const;
    double volume() const;
};

struct MeshStatistics {
    double h_surface = 0.0; // max panel diameter
    double h_volume = 0.0;  // max cell diameter
    int n_panels = 0;
    int n_cells = 0;
    double min_quality = 0.0; // min inradius/circumradius over cells
};

struct MeshPair {
    SurfaceMesh surface;
    VolumeMesh volume;
    DomainGeometry geometry;
};

/// Icosphere surface (20*4^refinement panels, vertices on the sphere) with a
/// radially layered tet volume: K = 2^refinement + 1 concentric copies of the
/// triangulation, prisms split into 3 tets each, innermost layer coned to the
/// center. Throws ConfigError for refinement > 6.
MeshPair build_ball_mesh(double radius, int refinement);

/// n^3 hexahedral cells split into 6 tets each (Kuhn split); the 12n^2
/// boundary triangles form the surface. Throws ConfigError for n > 24.
MeshPair build_cube_mesh(double half_width, int n);

MeshStatistics mesh_statistics(const SurfaceMesh& surface, const VolumeMesh& volume);

/// Distance from a point to a (closed) triangle.
double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

/// Distance from a point to the boundary (min over panels).
double distance_to_boundary(const SurfaceMesh& surface, const Vec3& p);

void export_mesh(const SurfaceMesh& surface, const VolumeMesh& volume, const std::string& path);
MeshPair import_mesh(const std::string& path);

} // namespace bdie

#endif
