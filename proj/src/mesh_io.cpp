#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "bdie/errors.hpp"
#include "bdie/mesh.hpp"

namespace bdie {

namespace {

void put(std::ostream& os, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
}

struct LineReader {
    std::istream& is;
    int line_no = 0;
    bool next(std::string& out) {
        while (std::getline(is, out)) {
            ++line_no;
            if (!out.empty()) return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& what) const {
        throw MeshIoError("mesh file line " + std::to_string(line_no) + ": " + what);
    }
};

int expect_section(LineReader& r, const std::string& name) {
    std::string line;
    if (!r.next(line)) throw MeshIoError("mesh file truncated: missing section " + name);
    std::istringstream ss(line);
    std::string tag;
    long count = -1;
    ss >> tag >> count;
    if (tag != name || count < 0)
        r.fail("expected section header '" + name + " <count>', got '" + line + "'");
    return static_cast<int>(count);
}

} // namespace

void export_mesh(const SurfaceMesh& surface, const VolumeMesh& volume, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw MeshIoError("cannot open '" + path + "' for writing");

    os << "VERTICES " << surface.vertices.size() << "\n";
    for (const Vec3& v : surface.vertices) {
        put(os, v[0]); os << ' '; put(os, v[1]); os << ' '; put(os, v[2]); os << "\n";
    }
    os << "PANELS " << surface.panels.size() << "\n";
    for (int j = 0; j < surface.panel_count(); ++j) {
        const auto& p = surface.panels[j];
        os << p[0] << ' ' << p[1] << ' ' << p[2] << ' ';
        const Vec3& c = surface.centroids[j];
        const Vec3& n = surface.normals[j];
        put(os, c[0]); os << ' '; put(os, c[1]); os << ' '; put(os, c[2]); os << ' ';
        put(os, surface.areas[j]); os << ' ';
        put(os, n[0]); os << ' '; put(os, n[1]); os << ' '; put(os, n[2]); os << "\n";
    }
    os << "NODES " << volume.nodes.size() << "\n";
    for (const Vec3& v : volume.nodes) {
        put(os, v[0]); os << ' '; put(os, v[1]); os << ' '; put(os, v[2]); os << "\n";
    }
    os << "CELLS " << volume.cells.size() << "\n";
    for (int c = 0; c < volume.cell_count(); ++c) {
        const auto& t = volume.cells[c];
        os << t[0] << ' ' << t[1] << ' ' << t[2] << ' ' << t[3] << ' ';
        const Vec3& b = volume.barycenters[c];
        put(os, b[0]); os << ' '; put(os, b[1]); os << ' '; put(os, b[2]); os << ' ';
        put(os, volume.volumes[c]); os << "\n";
    }
    os << "LINK " << volume.boundary_link.size() << "\n";
    for (const auto& f : volume.boundary_link)
        os << f.nodes[0] << ' ' << f.nodes[1] << ' ' << f.nodes[2] << ' ' << f.panel << "\n";
    if (!os) throw MeshIoError("write to '" + path + "' failed");
}

MeshPair import_mesh(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw MeshIoError("cannot open '" + path + "'");
    LineReader r{is};
    MeshPair mp;
    SurfaceMesh& s = mp.surface;
    VolumeMesh& vol = mp.volume;

    int n = expect_section(r, "VERTICES");
    s.vertices.resize(n);
    std::string line;
    for (int i = 0; i < n; ++i) {
        if (!r.next(line)) throw MeshIoError("mesh file truncated in section VERTICES");
        std::istringstream ss(line);
        if (!(ss >> s.vertices[i][0] >> s.vertices[i][1] >> s.vertices[i][2]))
            r.fail("bad vertex line");
    }

    n = expect_section(r, "PANELS");
    s.panels.resize(n);
    s.centroids.resize(n);
    s.areas.resize(n);
    s.normals.resize(n);
    for (int i = 0; i < n; ++i) {
        if (!r.next(line)) throw MeshIoError("mesh file truncated in section PANELS");
        std::istringstream ss(line);
        auto& p = s.panels[i];
        if (!(ss >> p[0] >> p[1] >> p[2] >> s.centroids[i][0] >> s.centroids[i][1] >>
              s.centroids[i][2] >> s.areas[i] >> s.normals[i][0] >> s.normals[i][1] >>
              s.normals[i][2]))
            r.fail("bad panel line");
        for (int k = 0; k < 3; ++k)
            if (p[k] < 0 || p[k] >= static_cast<int>(s.vertices.size()))
                r.fail("panel vertex index out of range");
        if (s.areas[i] <= 0.0) r.fail("panel area must be positive");
        if (std::abs(s.normals[i].norm() - 1.0) > 1e-12) r.fail("panel normal is not unit");
    }

    n = expect_section(r, "NODES");
    vol.nodes.resize(n);
    for (int i = 0; i < n; ++i) {
        if (!r.next(line)) throw MeshIoError("mesh file truncated in section NODES");
        std::istringstream ss(line);
        if (!(ss >> vol.nodes[i][0] >> vol.nodes[i][1] >> vol.nodes[i][2]))
            r.fail("bad node line");
    }

    n = expect_section(r, "CELLS");
    vol.cells.resize(n);
    vol.barycenters.resize(n);
    vol.volumes.resize(n);
    for (int i = 0; i < n; ++i) {
        if (!r.next(line)) throw MeshIoError("mesh file truncated in section CELLS");
        std::istringstream ss(line);
        auto& t = vol.cells[i];
        if (!(ss >> t[0] >> t[1] >> t[2] >> t[3] >> vol.barycenters[i][0] >>
              vol.barycenters[i][1] >> vol.barycenters[i][2] >> vol.volumes[i]))
            r.fail("bad cell line");
        for (int k = 0; k < 4; ++k)
            if (t[k] < 0 || t[k] >= static_cast<int>(vol.nodes.size()))
                r.fail("cell node index out of range");
        if (vol.volumes[i] <= 0.0) r.fail("cell volume must be positive");
    }

    n = expect_section(r, "LINK");
    vol.boundary_link.resize(n);
    for (int i = 0; i < n; ++i) {
        if (!r.next(line)) throw MeshIoError("mesh file truncated in section LINK");
        std::istringstream ss(line);
        auto& f = vol.boundary_link[i];
        if (!(ss >> f.nodes[0] >> f.nodes[1] >> f.nodes[2] >> f.panel)) r.fail("bad link line");
        if (f.panel < 0 || f.panel >= s.panel_count()) r.fail("link panel index out of range");
    }
    if (static_cast<int>(vol.boundary_link.size()) != s.panel_count())
        throw MeshIoError("LINK section does not cover every surface panel");
    return mp;
}

} // namespace bdie
