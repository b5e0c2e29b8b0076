#include "bdie/potentials.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <cstdio>
#include <fstream>

#include "bdie/errors.hpp"
#include "bdie/kernels.hpp"

namespace bdie {

using kernels::Guard;
using kernels::KernelId;
using quad::Cell;
using quad::Panel;
using quad::SingularPolicy;

// ---------------------------------------------------------------------------
// targets

Targets Targets::interior(std::vector<Vec3> pts) {
    Targets t;
    t.points = std::move(pts);
    return t;
}

Targets Targets::centroids(const SurfaceMesh& s) {
    Targets t;
    t.points = s.centroids;
    t.normals = s.normals;
    t.self_element.resize(s.panel_count());
    for (int j = 0; j < s.panel_count(); ++j) t.self_element[j] = j;
    return t;
}

Targets Targets::trace_points(const SurfaceMesh& s) {
    Targets t;
    t.points = s.centroids;
    t.normals = s.normals;
    return t;
}

Targets Targets::barycenters(const VolumeMesh& v) {
    Targets t;
    t.points = v.barycenters;
    t.self_element.resize(v.cell_count());
    for (int c = 0; c < v.cell_count(); ++c) t.self_element[c] = c;
    return t;
}

// ---------------------------------------------------------------------------
// PotentialMatrix

Vector PotentialMatrix::apply(const Vector& density) const {
    if (density.size() != m.cols())
        throw AssemblyError("apply: density length " + std::to_string(density.size()) +
                            " does not match operator columns " + std::to_string(m.cols()));
    return m * density;
}

void PotentialMatrix::dump(const std::string& file) const {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw AssemblyError("cannot open '" + file + "' for matrix dump");
    const std::uint64_t dims[2] = {static_cast<std::uint64_t>(m.rows()),
                                   static_cast<std::uint64_t>(m.cols())};
    os.write(reinterpret_cast<const char*>(dims), sizeof dims);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const Eigen::Matrix<double, 1, Eigen::Dynamic> row = m.row(i);
        os.write(reinterpret_cast<const char*>(row.data()),
                 static_cast<std::streamsize>(sizeof(double) * row.size()));
    }
    if (!os) throw AssemblyError("matrix dump to '" + file + "' failed");
}

PotentialMatrix PotentialMatrix::load(const std::string& file) {
    std::ifstream is(file, std::ios::binary);
    if (!is) throw AssemblyError("cannot open matrix dump '" + file + "'");
    std::uint64_t dims[2];
    is.read(reinterpret_cast<char*>(dims), sizeof dims);
    if (!is) throw AssemblyError("matrix dump '" + file + "' truncated");
    PotentialMatrix pm;
    pm.m.resize(static_cast<Eigen::Index>(dims[0]), static_cast<Eigen::Index>(dims[1]));
    for (std::uint64_t i = 0; i < dims[0]; ++i) {
        Eigen::Matrix<double, 1, Eigen::Dynamic> row(dims[1]);
        is.read(reinterpret_cast<char*>(row.data()),
                static_cast<std::streamsize>(sizeof(double) * dims[1]));
        if (!is) throw AssemblyError("matrix dump '" + file + "' truncated");
        pm.m.row(static_cast<Eigen::Index>(i)) = row;
    }
    return pm;
}

// ---------------------------------------------------------------------------
// surface operators

namespace {

enum class SurfVariant {
    V_param, V_rel, V_harm, V_py,
    W_param, W_rel, W_harm,
    Wp_param, Wp_rel, Wp_harm,
};

double surface_entry(SurfVariant sv, const SurfaceMesh& s, const CoefficientField* field,
                     const SingularPolicy& policy, const quad::TriangleRule& rule, const Vec3& y,
                     const Vec3& n_t, int j, bool self) {
    const Panel tri = s.panel_vertices(j);
    const Vec3& n_j = s.normals[j];
    const Guard guard{policy.eps_sing};

    if (self) {
        switch (sv) {
        case SurfVariant::V_param:
        case SurfVariant::V_rel:
            return -quad::integrate_panel_self(KernelId::parametrix_x, *field, n_j, tri, policy);
        case SurfVariant::V_harm: {
            const CoefficientField one(CoefficientField::Family::constant, {1.0});
            return -quad::integrate_panel_self(KernelId::laplace, one, n_j, tri, policy);
        }
        case SurfVariant::V_py:
            return -quad::integrate_panel_self(KernelId::parametrix_y, *field, n_j, tri, policy);
        case SurfVariant::W_param:
            return -quad::integrate_panel_self(KernelId::conormal_x, *field, n_j, tri, policy);
        case SurfVariant::W_rel: {
            // calW_D self is 0 on a flat panel; the -calV_D(rho dln a/dn) part remains
            quad::SelfKernel k{[&](const Vec3& x) { return n_j.dot(field->grad_log(x)); }, 1.0};
            return -quad::integrate_panel_self(k, tri, policy);
        }
        case SurfVariant::W_harm:
        case SurfVariant::Wp_param:
        case SurfVariant::Wp_rel:
        case SurfVariant::Wp_harm:
            return 0.0; // flat-panel principal values vanish
        }
    }

    switch (sv) {
    case SurfVariant::V_param:
        return quad::integrate_panel_t(
            [&](const Vec3& x) { return -kernels::parametrix_x(x, y, *field, guard); }, tri, y,
            policy, rule);
    case SurfVariant::V_rel:
        return quad::integrate_panel_t(
            [&](const Vec3& x) {
                return -kernels::laplace_fundamental(x, y, guard) / field->eval(x);
            },
            tri, y, policy, rule);
    case SurfVariant::V_harm:
        return quad::integrate_panel_t(
            [&](const Vec3& x) { return -kernels::laplace_fundamental(x, y, guard); }, tri, y,
            policy, rule);
    case SurfVariant::V_py: {
        const double inv_ay = 1.0 / field->eval(y);
        return quad::integrate_panel_t(
            [&](const Vec3& x) { return -kernels::laplace_fundamental(x, y, guard) * inv_ay; },
            tri, y, policy, rule);
    }
    case SurfVariant::W_param:
        return quad::integrate_panel_t(
            [&](const Vec3& x) { return -kernels::conormal_x_kernel(x, n_j, y, *field, guard); },
            tri, y, policy, rule);
    case SurfVariant::W_rel: {
        // W rho = W_D rho - V_D(rho dln a/dn), two integrals at shared points
        const double wd = quad::integrate_panel_t(
            [&](const Vec3& x) { return -kernels::laplace_conormal(x, n_j, y, guard); }, tri, y,
            policy, rule);
        const double vd = quad::integrate_panel_t(
            [&](const Vec3& x) {
                return -kernels::laplace_fundamental(x, y, guard) * n_j.dot(field->grad_log(x));
            },
            tri, y, policy, rule);
        return wd - vd;
    }
    case SurfVariant::W_harm:
        return quad::integrate_panel_t(
            [&](const Vec3& x) { return -kernels::laplace_conormal(x, n_j, y, guard); }, tri, y,
            policy, rule);
    case SurfVariant::Wp_param: {
        const double ay = field->eval(y);
        return quad::integrate_panel_t(
            [&](const Vec3& x) {
                return ay / field->eval(x) * n_t.dot(kernels::laplace_gradient_x(x, y, guard));
            },
            tri, y, policy, rule);
    }
    case SurfVariant::Wp_rel: {
        // W' rho = a * W'_D(rho / a): row scaled by a(y) outside the integral
        const double inner = quad::integrate_panel_t(
            [&](const Vec3& x) {
                return n_t.dot(kernels::laplace_gradient_x(x, y, guard)) / field->eval(x);
            },
            tri, y, policy, rule);
        return field->eval(y) * inner;
    }
    case SurfVariant::Wp_harm:
        return quad::integrate_panel_t(
            [&](const Vec3& x) { return n_t.dot(kernels::laplace_gradient_x(x, y, guard)); },
            tri, y, policy, rule);
    }
    return 0.0; // unreachable
}

template <class Sink>
void surface_rows(SurfVariant sv, const SurfaceMesh& s, const CoefficientField* field,
                  const SingularPolicy& policy, const Targets& targets, Execution exec,
                  Sink&& sink) {
    policy.validate();
    const quad::TriangleRule& rule = quad::TriangleRule::of_order(3);
    const int m = s.panel_count();
    for_each_row(targets.count(), exec, [&](int t) {
        const Vec3& y = targets.points[t];
        const Vec3 n_t = targets.normals.empty() ? Vec3::Zero() : targets.normals[t];
        const int self = targets.self(t);
        for (int j = 0; j < m; ++j)
            sink(t, j, surface_entry(sv, s, field, policy, rule, y, n_t, j, j == self));
    });
}

PotentialMatrix assemble_surface(SurfVariant sv, const char* name, const SurfaceMesh& s,
                                 const CoefficientField* field, const SingularPolicy& policy,
                                 const Targets& targets, AssemblyPath path, Execution exec) {
    PotentialMatrix pm;
    pm.op = name;
    pm.path = path;
    pm.m.resize(targets.count(), s.panel_count());
    surface_rows(sv, s, field, policy, targets, exec,
                 [&](int t, int j, double v) { pm.m(t, j) = v; });
    return pm;
}

SurfVariant pick(SurfVariant direct, SurfVariant relation, AssemblyPath path) {
    return path == AssemblyPath::direct ? direct : relation;
}

// ---------------------------------------------------------------------------
// volume operators

enum class VolVariant { P_param, P_rel, P_harm, P_py, R_param, R_rel, R_py };

VolVariant pick2(VolVariant direct, VolVariant relation, AssemblyPath path) {
    return path == AssemblyPath::direct ? direct : relation;
}

constexpr double inv4pi = 1.0 / four_pi;

/// Per-cell quadrature table: order-2 rule points with volume-scaled weights
/// and the coefficient data the kernels need, flattened for the far-field
/// fast path.
struct VolumeQuadTable {
    int nq = 0;
    std::vector<double> px, py, pz, w;
    std::vector<double> inv_a, a_val, lap, g0, g1, g2;

    static VolumeQuadTable build(const VolumeMesh& v, const CoefficientField* field) {
        const quad::TetRule& rule = quad::TetRule::of_order(2);
        VolumeQuadTable tab;
        tab.nq = static_cast<int>(rule.points.size());
        const std::size_t total = static_cast<std::size_t>(v.cell_count()) * tab.nq;
        tab.px.resize(total);
        tab.py.resize(total);
        tab.pz.resize(total);
        tab.w.resize(total);
        tab.inv_a.assign(total, 1.0);
        tab.a_val.assign(total, 1.0);
        tab.lap.assign(total, 0.0);
        tab.g0.assign(total, 0.0);
        tab.g1.assign(total, 0.0);
        tab.g2.assign(total, 0.0);
        for (int c = 0; c < v.cell_count(); ++c) {
            const auto tv = v.cell_vertices(c);
            for (int q = 0; q < tab.nq; ++q) {
                const auto& l = rule.points[q];
                const Vec3 x = l[0] * tv[0] + l[1] * tv[1] + l[2] * tv[2] + l[3] * tv[3];
                const std::size_t i = static_cast<std::size_t>(c) * tab.nq + q;
                tab.px[i] = x[0];
                tab.py[i] = x[1];
                tab.pz[i] = x[2];
                tab.w[i] = v.volumes[c] * rule.weights[q];
                if (field) {
                    const double a = field->eval(x);
                    const Vec3 g = field->grad_log(x);
                    tab.inv_a[i] = 1.0 / a;
                    tab.a_val[i] = a;
                    tab.lap[i] = field->laplacian_log(x);
                    tab.g0[i] = g[0];
                    tab.g1[i] = g[1];
                    tab.g2[i] = g[2];
                }
            }
        }
        return tab;
    }
};

double volume_far_sum(VolVariant vv, const VolumeQuadTable& tab, int c, const Vec3& y,
                      double inv_ay) {
    const std::size_t q0 = static_cast<std::size_t>(c) * tab.nq;
    double acc = 0.0;
    switch (vv) {
    case VolVariant::P_param:
        for (int q = 0; q < tab.nq; ++q) {
            const std::size_t i = q0 + q;
            const double dx = tab.px[i] - y[0], dy = tab.py[i] - y[1], dz = tab.pz[i] - y[2];
            const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
            acc += tab.w[i] * (-inv4pi / r) * tab.inv_a[i];
        }
        return acc;
    case VolVariant::P_rel:
        for (int q = 0; q < tab.nq; ++q) {
            const std::size_t i = q0 + q;
            const double dx = tab.px[i] - y[0], dy = tab.py[i] - y[1], dz = tab.pz[i] - y[2];
            const double pd = -inv4pi / std::sqrt(dx * dx + dy * dy + dz * dz);
            acc += tab.w[i] * pd * tab.inv_a[i];
        }
        return acc;
    case VolVariant::P_harm:
        for (int q = 0; q < tab.nq; ++q) {
            const std::size_t i = q0 + q;
            const double dx = tab.px[i] - y[0], dy = tab.py[i] - y[1], dz = tab.pz[i] - y[2];
            acc += tab.w[i] * (-inv4pi / std::sqrt(dx * dx + dy * dy + dz * dz));
        }
        return acc;
    case VolVariant::P_py:
        for (int q = 0; q < tab.nq; ++q) {
            const std::size_t i = q0 + q;
            const double dx = tab.px[i] - y[0], dy = tab.py[i] - y[1], dz = tab.pz[i] - y[2];
            acc += tab.w[i] * (-inv4pi / std::sqrt(dx * dx + dy * dy + dz * dz));
        }
        return acc * inv_ay;
    case VolVariant::R_param:
        for (int q = 0; q < tab.nq; ++q) {
            const std::size_t i = q0 + q;
            const double dx = tab.px[i] - y[0], dy = tab.py[i] - y[1], dz = tab.pz[i] - y[2];
            const double r2 = dx * dx + dy * dy + dz * dz;
            const double ir = 1.0 / std::sqrt(r2);
            const double pd = -inv4pi * ir;
            const double gdot = tab.g0[i] * dx + tab.g1[i] * dy + tab.g2[i] * dz;
            acc += tab.w[i] * (-tab.lap[i] * pd - inv4pi * ir / r2 * gdot);
        }
        return acc;
    case VolVariant::R_rel:
        // grad_y [P_D(rho grad ln a)] - P_D(rho lap ln a), grad_y P_D = -grad_x P_D
        for (int q = 0; q < tab.nq; ++q) {
            const std::size_t i = q0 + q;
            const double dx = tab.px[i] - y[0], dy = tab.py[i] - y[1], dz = tab.pz[i] - y[2];
            const double r2 = dx * dx + dy * dy + dz * dz;
            const double ir = 1.0 / std::sqrt(r2);
            const double pd = -inv4pi * ir;
            const double gyx = -dx * inv4pi * ir / r2;
            const double gyy = -dy * inv4pi * ir / r2;
            const double gyz = -dz * inv4pi * ir / r2;
            acc += tab.w[i] *
                   ((gyx * tab.g0[i] + gyy * tab.g1[i] + gyz * tab.g2[i]) - pd * tab.lap[i]);
        }
        return acc;
    case VolVariant::R_py:
        for (int q = 0; q < tab.nq; ++q) {
            const std::size_t i = q0 + q;
            const double dx = tab.px[i] - y[0], dy = tab.py[i] - y[1], dz = tab.pz[i] - y[2];
            const double r2 = dx * dx + dy * dy + dz * dz;
            const double ir = 1.0 / std::sqrt(r2);
            const double gdot =
                tab.a_val[i] * (tab.g0[i] * dx + tab.g1[i] * dy + tab.g2[i] * dz);
            acc += tab.w[i] * inv4pi * ir / r2 * gdot;
        }
        return acc * inv_ay;
    }
    return acc;
}

double volume_near_entry(VolVariant vv, const VolumeMesh& v, const CoefficientField* field,
                         const SingularPolicy& policy, const quad::TetRule& rule, const Vec3& y,
                         double inv_ay, int c) {
    const Cell tet = v.cell_vertices(c);
    const Guard guard{policy.eps_sing};
    switch (vv) {
    case VolVariant::P_param:
        return quad::integrate_cell_t(
            [&](const Vec3& x) { return kernels::parametrix_x(x, y, *field, guard); }, tet, y,
            policy, rule);
    case VolVariant::P_rel:
        return quad::integrate_cell_t(
            [&](const Vec3& x) {
                return kernels::laplace_fundamental(x, y, guard) / field->eval(x);
            },
            tet, y, policy, rule);
    case VolVariant::P_harm:
        return quad::integrate_cell_t(
            [&](const Vec3& x) { return kernels::laplace_fundamental(x, y, guard); }, tet, y,
            policy, rule);
    case VolVariant::P_py:
        return inv_ay * quad::integrate_cell_t(
                            [&](const Vec3& x) {
                                return kernels::laplace_fundamental(x, y, guard);
                            },
                            tet, y, policy, rule);
    case VolVariant::R_param:
        return quad::integrate_cell_t(
            [&](const Vec3& x) { return kernels::remainder_x(x, y, *field, guard); }, tet, y,
            policy, rule);
    case VolVariant::R_rel:
        return quad::integrate_cell_t(
            [&](const Vec3& x) {
                const Vec3 grad_y = -kernels::laplace_gradient_x(x, y, guard);
                return grad_y.dot(field->grad_log(x)) -
                       kernels::laplace_fundamental(x, y, guard) * field->laplacian_log(x);
            },
            tet, y, policy, rule);
    case VolVariant::R_py:
        return quad::integrate_cell_t(
            [&](const Vec3& x) { return kernels::remainder_y(x, y, *field, guard); }, tet, y,
            policy, rule);
    }
    return 0.0;
}

double volume_self_entry(VolVariant vv, const VolumeMesh& v, const CoefficientField* field,
                         const SingularPolicy& policy, const Vec3& y, double inv_ay, int c) {
    const Cell tet = v.cell_vertices(c);
    static const CoefficientField unit(CoefficientField::Family::constant, {1.0});
    switch (vv) {
    case VolVariant::P_param:
    case VolVariant::P_rel:
        return quad::integrate_cell_self(KernelId::parametrix_x, *field, tet, policy, y);
    case VolVariant::P_harm:
        return quad::integrate_cell_self(KernelId::laplace, unit, tet, policy, y);
    case VolVariant::P_py:
        return quad::integrate_cell_self(KernelId::parametrix_y, *field, tet, policy, y);
    case VolVariant::R_param:
    case VolVariant::R_rel:
        return quad::integrate_cell_self(KernelId::remainder_x, *field, tet, policy, y);
    case VolVariant::R_py:
        return quad::integrate_cell_self(KernelId::remainder_y, *field, tet, policy, y);
    }
    (void)inv_ay;
    return 0.0;
}

template <class Sink>
void volume_rows(VolVariant vv, const VolumeMesh& v, const CoefficientField* field,
                 const SingularPolicy& policy, const Targets& targets, Execution exec,
                 Sink&& sink) {
    policy.validate();
    const VolumeQuadTable tab = VolumeQuadTable::build(v, field);
    const quad::TetRule& rule = quad::TetRule::of_order(2);
    const int n_cells = v.cell_count();
    std::vector<double> near_r2(n_cells);
    for (int c = 0; c < n_cells; ++c) {
        const double d = policy.near_threshold * v.cell_diameter(c);
        near_r2[c] = d * d;
    }
    const bool needs_field = vv != VolVariant::P_harm;
    if (needs_field && field == nullptr)
        throw AssemblyError("volume operator needs a coefficient field");

    for_each_row(targets.count(), exec, [&](int t) {
        const Vec3 y = targets.points[t];
        const double inv_ay = field ? 1.0 / field->eval(y) : 1.0;
        const int self = targets.self(t);
        for (int c = 0; c < n_cells; ++c) {
            double val;
            if (c == self) {
                val = volume_self_entry(vv, v, field, policy, y, inv_ay, c);
            } else {
                const double ddx = v.barycenters[c][0] - y[0];
                const double ddy = v.barycenters[c][1] - y[1];
                const double ddz = v.barycenters[c][2] - y[2];
                const double dist2 = ddx * ddx + ddy * ddy + ddz * ddz;
                val = dist2 > near_r2[c]
                          ? volume_far_sum(vv, tab, c, y, inv_ay)
                          : volume_near_entry(vv, v, field, policy, rule, y, inv_ay, c);
            }
            sink(t, c, val);
        }
    });
}

PotentialMatrix assemble_volume(VolVariant vv, const char* name, const VolumeMesh& v,
                                const CoefficientField* field, const SingularPolicy& policy,
                                const Targets& targets, AssemblyPath path, Execution exec) {
    PotentialMatrix pm;
    pm.op = name;
    pm.path = path;
    pm.m.resize(targets.count(), v.cell_count());
    volume_rows(vv, v, field, policy, targets, exec,
                [&](int t, int c, double val) { pm.m(t, c) = val; });
    return pm;
}

} // namespace

// ---------------------------------------------------------------------------
// public assembly API

PotentialMatrix assemble_V(const SurfaceMesh& s, const Targets& targets,
                           const CoefficientField& field, const SingularPolicy& policy,
                           AssemblyPath path, Execution exec) {
    return assemble_surface(pick(SurfVariant::V_param, SurfVariant::V_rel, path), "V", s, &field,
                            policy, targets, path, exec);
}

PotentialMatrix assemble_W(const SurfaceMesh& s, const Targets& targets,
                           const CoefficientField& field, const SingularPolicy& policy,
                           AssemblyPath path, Execution exec) {
    return assemble_surface(pick(SurfVariant::W_param, SurfVariant::W_rel, path), "W", s, &field,
                            policy, targets, path, exec);
}

PotentialMatrix assemble_calV(const SurfaceMesh& s, const CoefficientField& field,
                              const SingularPolicy& policy, AssemblyPath path, Execution exec) {
    return assemble_surface(pick(SurfVariant::V_param, SurfVariant::V_rel, path), "calV", s,
                            &field, policy, Targets::centroids(s), path, exec);
}

PotentialMatrix assemble_calW(const SurfaceMesh& s, const CoefficientField& field,
                              const SingularPolicy& policy, AssemblyPath path, Execution exec) {
    return assemble_surface(pick(SurfVariant::W_param, SurfVariant::W_rel, path), "calW", s,
                            &field, policy, Targets::centroids(s), path, exec);
}

PotentialMatrix assemble_calWprime(const SurfaceMesh& s, const CoefficientField& field,
                                   const SingularPolicy& policy, AssemblyPath path,
                                   Execution exec) {
    return assemble_surface(pick(SurfVariant::Wp_param, SurfVariant::Wp_rel, path), "calWprime",
                            s, &field, policy, Targets::centroids(s), path, exec);
}

PotentialMatrix assemble_P(const VolumeMesh& v, const Targets& targets,
                           const CoefficientField& field, const SingularPolicy& policy,
                           AssemblyPath path, Execution exec) {
    return assemble_volume(pick2(VolVariant::P_param, VolVariant::P_rel, path), "P", v, &field,
                           policy, targets, path, exec);
}

PotentialMatrix assemble_R(const VolumeMesh& v, const Targets& targets,
                           const CoefficientField& field, const SingularPolicy& policy,
                           AssemblyPath path, Execution exec) {
    return assemble_volume(pick2(VolVariant::R_param, VolVariant::R_rel, path), "R", v, &field,
                           policy, targets, path, exec);
}

PotentialMatrix assemble_V_harmonic(const SurfaceMesh& s, const Targets& t,
                                    const SingularPolicy& p) {
    return assemble_surface(SurfVariant::V_harm, "V_laplace", s, nullptr, p, t,
                            AssemblyPath::direct, Execution::parallel);
}

PotentialMatrix assemble_W_harmonic(const SurfaceMesh& s, const Targets& t,
                                    const SingularPolicy& p) {
    return assemble_surface(SurfVariant::W_harm, "W_laplace", s, nullptr, p, t,
                            AssemblyPath::direct, Execution::parallel);
}

PotentialMatrix assemble_calV_harmonic(const SurfaceMesh& s, const SingularPolicy& p) {
    return assemble_surface(SurfVariant::V_harm, "calV_laplace", s, nullptr, p,
                            Targets::centroids(s), AssemblyPath::direct, Execution::parallel);
}

PotentialMatrix assemble_calW_harmonic(const SurfaceMesh& s, const SingularPolicy& p) {
    return assemble_surface(SurfVariant::W_harm, "calW_laplace", s, nullptr, p,
                            Targets::centroids(s), AssemblyPath::direct, Execution::parallel);
}

PotentialMatrix assemble_calWprime_harmonic(const SurfaceMesh& s, const SingularPolicy& p) {
    return assemble_surface(SurfVariant::Wp_harm, "calWprime_laplace", s, nullptr, p,
                            Targets::centroids(s), AssemblyPath::direct, Execution::parallel);
}

PotentialMatrix assemble_P_harmonic(const VolumeMesh& v, const Targets& t,
                                    const SingularPolicy& p) {
    return assemble_volume(VolVariant::P_harm, "P_laplace", v, nullptr, p, t,
                           AssemblyPath::direct, Execution::parallel);
}

PotentialMatrix assemble_calV_py(const SurfaceMesh& s, const CoefficientField& field,
                                 const SingularPolicy& p) {
    return assemble_surface(SurfVariant::V_py, "calV_py", s, &field, p, Targets::centroids(s),
                            AssemblyPath::direct, Execution::parallel);
}

PotentialMatrix assemble_P_py(const VolumeMesh& v, const Targets& t, const CoefficientField& field,
                              const SingularPolicy& p) {
    return assemble_volume(VolVariant::P_py, "P_py", v, &field, p, t, AssemblyPath::direct,
                           Execution::parallel);
}

PotentialMatrix assemble_R_py(const VolumeMesh& v, const Targets& t, const CoefficientField& field,
                              const SingularPolicy& p) {
    return assemble_volume(VolVariant::R_py, "R_py", v, &field, p, t, AssemblyPath::direct,
                           Execution::parallel);
}

Vector apply_surface_potential(SurfOp op, const SurfaceMesh& s, const CoefficientField* field,
                               const SingularPolicy& policy, const Vector& density,
                               const Targets& targets, Execution exec) {
    if (density.size() != s.panel_count())
        throw AssemblyError("surface density length does not match panel count");
    SurfVariant sv;
    if (op == SurfOp::V)
        sv = field ? SurfVariant::V_param : SurfVariant::V_harm;
    else
        sv = field ? SurfVariant::W_param : SurfVariant::W_harm;
    Vector out = Vector::Zero(targets.count());
    surface_rows(sv, s, field, policy, targets, exec,
                 [&](int t, int j, double v) { out[t] += v * density[j]; });
    return out;
}

Vector apply_volume_potential(VolOp op, const VolumeMesh& v, const CoefficientField* field,
                              const SingularPolicy& policy, const Vector& density,
                              const Targets& targets, Execution exec) {
    if (density.size() != v.cell_count())
        throw AssemblyError("domain density length does not match cell count");
    VolVariant vv;
    if (op == VolOp::P)
        vv = field ? VolVariant::P_param : VolVariant::P_harm;
    else
        vv = VolVariant::R_param;
    Vector out = Vector::Zero(targets.count());
    volume_rows(vv, v, field, policy, targets, exec,
                [&](int t, int c, double val) { out[t] += val * density[c]; });
    return out;
}

std::vector<Vec3> surface_single_layer_gradient(const SurfaceMesh& s,
                                                const CoefficientField& field,
                                                const SingularPolicy& policy,
                                                const Vector& density, const Targets& targets) {
    // grad_y V psi = + int grad_x P_D(x-y) psi(x)/a(x) dS
    policy.validate();
    const quad::TriangleRule& rule = quad::TriangleRule::of_order(3);
    const Guard guard{policy.eps_sing};
    std::vector<Vec3> out(targets.count(), Vec3::Zero());
    for_each_row(targets.count(), Execution::parallel, [&](int t) {
        const Vec3& y = targets.points[t];
        Vec3 acc = Vec3::Zero();
        for (int j = 0; j < s.panel_count(); ++j) {
            const Panel tri = s.panel_vertices(j);
            for (int comp = 0; comp < 3; ++comp) {
                acc[comp] += density[j] *
                             quad::integrate_panel_t(
                                 [&](const Vec3& x) {
                                     return kernels::laplace_gradient_x(x, y, guard)[comp] /
                                            field.eval(x);
                                 },
                                 tri, y, policy, rule);
            }
        }
        out[t] = acc;
    });
    return out;
}

int find_containing_cell(const VolumeMesh& v, const Vec3& y) {
    for (int c = 0; c < v.cell_count(); ++c) {
        if ((y - v.barycenters[c]).norm() > v.cell_diameter(c)) continue;
        const auto tv = v.cell_vertices(c);
        Eigen::Matrix3d A;
        for (int i = 0; i < 3; ++i) A.col(i) = tv[i + 1] - tv[0];
        const Vec3 lam = A.partialPivLu().solve(y - tv[0]);
        const double l0 = 1.0 - lam.sum();
        const double tol = -1e-12;
        if (lam[0] >= tol && lam[1] >= tol && lam[2] >= tol && l0 >= tol) return c;
    }
    return -1;
}

} // namespace bdie
