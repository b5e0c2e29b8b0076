#include "bdie/bdie_system.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>

#include "bdie/errors.hpp"
#include "bdie/kernels.hpp"
#include "bdie/parallel.hpp"

namespace bdie {

// ---------------------------------------------------------------------------
// right-hand side / problem

RightHandSide RightHandSide::zero() {
    RightHandSide r;
    r.kind = Kind::density;
    return r;
}

RightHandSide RightHandSide::from_density(std::function<double(const Vec3&)> f) {
    RightHandSide r;
    r.kind = Kind::density;
    r.density = std::move(f);
    return r;
}

RightHandSide RightHandSide::from_sources(std::vector<PointSource> s) {
    RightHandSide r;
    r.kind = Kind::point_sources;
    r.sources = std::move(s);
    return r;
}

bool RightHandSide::is_zero_density() const {
    return kind == Kind::density && !density;
}

BoundaryDensity sample_on_centroids(const SurfaceMesh& s,
                                    const std::function<double(const Vec3&)>& f) {
    BoundaryDensity d;
    d.values.resize(s.panel_count());
    for (int j = 0; j < s.panel_count(); ++j) d.values[j] = f(s.centroids[j]);
    return d;
}

DomainDensity sample_on_barycenters(const VolumeMesh& v,
                                    const std::function<double(const Vec3&)>& f) {
    DomainDensity d;
    d.values.resize(v.cell_count());
    for (int c = 0; c < v.cell_count(); ++c) d.values[c] = f(v.barycenters[c]);
    return d;
}

void DirichletProblem::validate() {
    const SurfaceMesh& s = mesh.surface;
    const VolumeMesh& v = mesh.volume;
    if (dirichlet.values.size() != s.panel_count())
        throw ConfigError("dirichlet data length does not match panel count");
    if (static_cast<int>(v.boundary_link.size()) != s.panel_count())
        throw ConfigError("boundary_link does not cover every panel");

    // bijection with coordinate coincidence
    std::vector<char> seen(s.panel_count(), 0);
    for (const auto& f : v.boundary_link) {
        if (f.panel < 0 || f.panel >= s.panel_count() || seen[f.panel])
            throw ConfigError("boundary_link is not a bijection");
        seen[f.panel] = 1;
        std::array<Vec3, 3> fc{v.nodes[f.nodes[0]], v.nodes[f.nodes[1]], v.nodes[f.nodes[2]]};
        const auto pv = s.panel_vertices(f.panel);
        for (const Vec3& a : fc) {
            double best = std::numeric_limits<double>::infinity();
            for (const Vec3& b : pv) best = std::min(best, (a - b).norm());
            if (best > 1e-12 * (1.0 + a.norm()))
                throw ConfigError("boundary face does not coincide with its panel");
        }
    }

    const Box box = s.bounding_box();
    field.validate_on(box);
    policy.validate();
    policy.eps_sing = 1e-14 * box.diameter();

    if (rhs.kind == RightHandSide::Kind::point_sources) {
        const double h = mesh_statistics(s, v).h_surface;
        for (const auto& src : rhs.sources) {
            if (!mesh.geometry.contains(src.location))
                throw ConfigError("point source lies outside the domain");
            if (distance_to_boundary(s, src.location) <= h)
                throw ConfigError("point source closer than h to the boundary");
        }
    }
}

// ---------------------------------------------------------------------------
// F0

namespace {

/// P f~ for point sources: P delta_{x0}(y) = P_D(x0-y)/a(x0).
Vector point_source_potential(const DirichletProblem& p, const Targets& targets,
                              int* near_warnings) {
    const double h = mesh_statistics(p.mesh.surface, p.mesh.volume).h_surface;
    const kernels::Guard guard{p.policy.eps_sing};
    Vector out = Vector::Zero(targets.count());
    int warn = 0;
    for (int t = 0; t < targets.count(); ++t) {
        const Vec3& y = targets.points[t];
        double acc = 0.0;
        for (const auto& src : p.rhs.sources) {
            const double dist = (src.location - y).norm();
            if (dist < h) ++warn;
            acc += src.strength * kernels::parametrix_x(src.location, y, p.field, guard);
        }
        out[t] = acc;
    }
    if (near_warnings) *near_warnings += warn;
    return out;
}

Vector volume_potential_of_rhs(const DirichletProblem& p, const Targets& targets, Execution exec,
                               int* near_warnings) {
    if (p.rhs.kind == RightHandSide::Kind::point_sources)
        return point_source_potential(p, targets, near_warnings);
    if (p.rhs.is_zero_density()) return Vector::Zero(targets.count());
    const DomainDensity f = sample_on_barycenters(p.mesh.volume, p.rhs.density);
    if (f.values.cwiseAbs().maxCoeff() == 0.0) return Vector::Zero(targets.count());
    return apply_volume_potential(VolOp::P, p.mesh.volume, &p.field, p.policy, f.values, targets,
                                  exec);
}

bool is_zero(const Vector& v) { return v.size() == 0 || v.cwiseAbs().maxCoeff() == 0.0; }

} // namespace

Vector assemble_F0(const DirichletProblem& p, const Targets& targets, Execution exec,
                   int* near_warnings) {
    Vector f0 = volume_potential_of_rhs(p, targets, exec, near_warnings);
    if (!is_zero(p.dirichlet.values))
        f0 -= apply_surface_potential(SurfOp::W, p.mesh.surface, &p.field, p.policy,
                                      p.dirichlet.values, targets, exec);
    return f0;
}

Vector assemble_trace_F0(const DirichletProblem& p, Execution exec) {
    const SurfaceMesh& s = p.mesh.surface;
    Vector f0 = volume_potential_of_rhs(p, Targets::trace_points(s), exec, nullptr);
    if (!is_zero(p.dirichlet.values)) {
        // gamma+ (W phi0) = calW phi0 - phi0/2
        Vector calW_phi = apply_surface_potential(SurfOp::W, s, &p.field, p.policy,
                                                  p.dirichlet.values, Targets::centroids(s), exec);
        f0 -= calW_phi - 0.5 * p.dirichlet.values;
    }
    return f0;
}

// ---------------------------------------------------------------------------
// system

Vector BdieSystem::rhs() const {
    Vector b(size());
    b.head(n_cells) = rhs_domain;
    b.tail(n_panels) = rhs_trace;
    return b;
}

Vector BdieSystem::apply(const Vector& u_psi) const {
    if (u_psi.size() != size()) throw SolverError("system apply: dimension mismatch");
    const Vector u = u_psi.head(n_cells);
    const Vector psi = u_psi.tail(n_panels);
    Vector top = u;
    if (!constant_field) top += parallel_matvec(R, u);
    top.noalias() -= V * psi;
    Vector bottom = -(calV * psi);
    if (!constant_field) bottom.noalias() += gR * u;
    Vector out(size());
    out.head(n_cells) = top;
    out.tail(n_panels) = bottom;
    return out;
}

Matrix BdieSystem::dense() const {
    const int n = size();
    if (static_cast<double>(n) * n * 8.0 > 3.5e9)
        throw SolverError("dense system of size " + std::to_string(n) +
                          " exceeds the direct-solver memory budget; use the iterative method");
    Matrix A = Matrix::Zero(n, n);
    if (constant_field)
        A.topLeftCorner(n_cells, n_cells).setIdentity();
    else {
        A.topLeftCorner(n_cells, n_cells) = R;
        A.topLeftCorner(n_cells, n_cells).diagonal().array() += 1.0;
        A.bottomLeftCorner(n_panels, n_cells) = gR;
    }
    A.topRightCorner(n_cells, n_panels) = -V;
    A.bottomRightCorner(n_panels, n_panels) = -calV;
    return A;
}

BdieSystem assemble_system(const DirichletProblem& p, Execution exec) {
    BdieSystem sys;
    const SurfaceMesh& s = p.mesh.surface;
    const VolumeMesh& v = p.mesh.volume;
    sys.n_cells = v.cell_count();
    sys.n_panels = s.panel_count();
    sys.constant_field = p.field.is_constant();

    const Targets bary = Targets::barycenters(v);
    const Targets bary_pts = Targets::interior(v.barycenters);
    if (!sys.constant_field) {
        sys.R = assemble_R(v, bary, p.field, p.policy, AssemblyPath::direct, exec).m;
        sys.gR = assemble_R(v, Targets::trace_points(s), p.field, p.policy, AssemblyPath::direct,
                            exec)
                     .m;
    }
    sys.V = assemble_V(s, bary_pts, p.field, p.policy, AssemblyPath::direct, exec).m;
    sys.calV = assemble_calV(s, p.field, p.policy, AssemblyPath::direct, exec).m;

    sys.rhs_domain = assemble_F0(p, bary_pts, exec);
    sys.rhs_trace = assemble_trace_F0(p, exec) - p.dirichlet.values;
    return sys;
}

// ---------------------------------------------------------------------------
// solve

namespace {

Solution finish_solution(const BdieSystem& sys, const Vector& x, double cond, int iterations,
                         const std::string& method, double tol) {
    Solution sol;
    sol.u.values = x.head(sys.n_cells);
    sol.psi.values = x.tail(sys.n_panels);
    const Vector b = sys.rhs();
    const double bnorm = b.norm();
    const double rnorm = (sys.apply(x) - b).norm();
    sol.residual_norm = bnorm > 0.0 ? rnorm / bnorm : rnorm;
    sol.condition_estimate = cond;
    sol.iterations = iterations;
    sol.method = method;
    if (bnorm > 0.0 && sol.residual_norm > tol)
        throw SolverError("solution residual " + std::to_string(sol.residual_norm) +
                          " exceeds the configured tolerance");
    return sol;
}

} // namespace

Solution solve(const BdieSystem& sys, const SolveOptions& opts) {
    if (opts.method == SolveMethod::iterative) {
        Vector x = opts.initial_guess.size() == sys.size() ? opts.initial_guess
                                                           : Vector::Zero(sys.size());
        GmresOptions gopt;
        gopt.tol = opts.tol;
        gopt.restart = opts.restart;
        gopt.max_iterations = opts.max_iterations;
        const GmresResult r =
            gmres([&](const Vector& v) { return sys.apply(v); }, sys.rhs(), x, gopt);
        if (!r.converged)
            throw SolverError("GMRES did not reach tolerance " + std::to_string(opts.tol) +
                              " in " + std::to_string(r.iterations) +
                              " iterations (residual " + std::to_string(r.rel_residual) + ")");
        return finish_solution(sys, x, r.cond_estimate, r.iterations, "iterative", opts.tol);
    }

    if (sys.constant_field) {
        // R = 0 exactly: the system is block triangular, solve calV then back-substitute
        Eigen::PartialPivLU<Matrix> lu(sys.calV);
        if (lu.matrixLU().diagonal().cwiseAbs().minCoeff() == 0.0)
            throw SolverError("calV block is singular to working precision");
        const Vector psi = lu.solve(-sys.rhs_trace);
        const Vector u = sys.rhs_domain + sys.V * psi;
        Vector x(sys.size());
        x.head(sys.n_cells) = u;
        x.tail(sys.n_panels) = psi;
        const double rc = lu.rcond();
        return finish_solution(sys, x, rc > 0.0 ? 1.0 / rc : 0.0, 0, "direct_lu", opts.tol);
    }

    Matrix A = sys.dense();
    Eigen::PartialPivLU<Eigen::Ref<Matrix>> lu(A); // in place
    if (lu.matrixLU().diagonal().cwiseAbs().minCoeff() == 0.0)
        throw SolverError("system matrix is singular to working precision "
                          "(discretization pathology; see condition report)");
    const Vector x = lu.solve(sys.rhs());
    const double rc = lu.rcond();
    if (rc > 0.0 && rc < 1e-15)
        throw SolverError("system matrix is singular to working precision (rcond " +
                          std::to_string(rc) + ")");
    return finish_solution(sys, x, rc > 0.0 ? 1.0 / rc : 0.0, 0, "direct_lu", opts.tol);
}

// ---------------------------------------------------------------------------
// representation formula

Vector evaluate_representation(const Solution& sol, const DirichletProblem& p,
                               const std::vector<Vec3>& points) {
    const SurfaceMesh& s = p.mesh.surface;
    const VolumeMesh& v = p.mesh.volume;
    const double h = mesh_statistics(s, v).h_volume;
    Targets targets = Targets::interior(points);
    targets.self_element.resize(points.size(), -1);
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!p.mesh.geometry.contains(points[i]))
            throw ConfigError("representation point lies outside the domain");
        if (distance_to_boundary(s, points[i]) < 0.5 * h)
            throw ConfigError("representation point closer than h/2 to the boundary");
        targets.self_element[i] = find_containing_cell(v, points[i]);
    }

    Vector u = volume_potential_of_rhs(p, targets, Execution::parallel, nullptr);
    if (!p.field.is_constant())
        u -= apply_volume_potential(VolOp::R, v, &p.field, p.policy, sol.u.values, targets);
    u += apply_surface_potential(SurfOp::V, s, &p.field, p.policy, sol.psi.values, targets);
    if (!is_zero(p.dirichlet.values))
        u -= apply_surface_potential(SurfOp::W, s, &p.field, p.policy, p.dirichlet.values,
                                     targets);
    return u;
}

std::vector<ConditionRow> condition_report(
    const std::function<DirichletProblem(int)>& make_problem, const std::vector<int>& levels) {
    std::vector<ConditionRow> rows;
    for (int level : levels) {
        DirichletProblem p = make_problem(level);
        p.validate();
        const BdieSystem sys = assemble_system(p);
        const Solution sol = solve(sys, {});
        ConditionRow row;
        row.level = level;
        row.h = mesh_statistics(p.mesh.surface, p.mesh.volume).h_volume;
        row.cond_estimate = sol.condition_estimate;
        row.residual = sol.residual_norm;
        rows.push_back(row);
    }
    return rows;
}

} // namespace bdie
