#ifndef BDIE_BDIE_SYSTEM_HPP
#define BDIE_BDIE_SYSTEM_HPP

#include <functional>
#include <string>
#include <vector>

#include "bdie/coefficient.hpp"
#include "bdie/mesh.hpp"
#include "bdie/potentials.hpp"
#include "bdie/solver.hpp"

namespace bdie {

/// Right-hand side of the PDE: either a density sampled to cells (realized
/// as its zero extension) or interior point sources (H^{-1} data).
struct RightHandSide {
    enum class Kind { density, point_sources };
    struct PointSource {
        Vec3 location;
        double strength = 1.0;
    };

    Kind kind = Kind::density;
    std::function<double(const Vec3&)> density; // nullptr-equivalent => zero
    std::vector<PointSource> sources;

    static RightHandSide zero();
    static RightHandSide from_density(std::function<double(const Vec3&)> f);
    static RightHandSide from_sources(std::vector<PointSource> s);
    bool is_zero_density() const;
};

struct DirichletProblem {
    MeshPair mesh;
    CoefficientField field;
    RightHandSide rhs;
    BoundaryDensity dirichlet; // phi_0 sampled at panel centroids
    quad::SingularPolicy policy;

    /// Positivity scan, boundary-link bijection, point-source separation;
    /// scales policy.eps_sing from the domain diameter. Throws ConfigError.
    void validate();
};

BoundaryDensity sample_on_centroids(const SurfaceMesh& s,
                                    const std::function<double(const Vec3&)>& f);
DomainDensity sample_on_barycenters(const VolumeMesh& v,
                                    const std::function<double(const Vec3&)>& f);

/// Discrete system A1 [u psi]^T = F1 stored blockwise:
///   [ I + R   -V    ] [u  ]   [ F0 at barycenters          ]
///   [ gR      -calV ] [psi] = [ trace F0 - phi0 at centroids]
/// R and gR stay empty for constant coefficients (they are exactly zero).
struct BdieSystem {
    int n_cells = 0;
    int n_panels = 0;
    bool constant_field = false;
    Matrix R;
    Matrix V;
    Matrix gR;
    Matrix calV;
    Vector rhs_domain;
    Vector rhs_trace;

    int size() const { return n_cells + n_panels; }
    Vector rhs() const;
    Vector apply(const Vector& u_psi) const; // operator action, block matvec
    Matrix dense() const;                    // concatenated matrix (LU path)
};

enum class SolveMethod { direct_lu, iterative };

struct SolveOptions {
    SolveMethod method = SolveMethod::direct_lu;
    double tol = 1e-10;
    int restart = 400;
    int max_iterations = 5000;
    Vector initial_guess; // iterative only; empty => zero
};

struct Solution {
    DomainDensity u;
    BoundaryDensity psi;
    double residual_norm = 0.0;
    double condition_estimate = 0.0;
    int iterations = 0;
    std::string method;
};

/// F0 = P f~ - W phi_0 at interior targets. near_warnings counts point
/// sources closer than h to a target.
Vector assemble_F0(const DirichletProblem& p, const Targets& targets,
                   Execution exec = Execution::parallel, int* near_warnings = nullptr);

/// gamma+ F0 at panel centroids, via gamma+ W = calW - I/2.
Vector assemble_trace_F0(const DirichletProblem& p, Execution exec = Execution::parallel);

BdieSystem assemble_system(const DirichletProblem& p, Execution exec = Execution::parallel);

Solution solve(const BdieSystem& sys, const SolveOptions& opts = {});

/// u(y) = P f~(y) - R u(y) + V psi(y) - W phi_0(y) at interior points.
Vector evaluate_representation(const Solution& sol, const DirichletProblem& p,
                               const std::vector<Vec3>& points);

struct ConditionRow {
    int level = 0;
    double h = 0.0;
    double cond_estimate = 0.0;
    double residual = 0.0;
};

/// 1-norm condition estimates of the assembled system across refinements
/// (dense LU path; growth is reported, not asserted).
std::vector<ConditionRow> condition_report(
    const std::function<DirichletProblem(int)>& make_problem, const std::vector<int>& levels);

} // namespace bdie

#endif
