#ifndef BDIE_POTENTIALS_HPP
#define BDIE_POTENTIALS_HPP

#include <string>
#include <vector>

#include "bdie/coefficient.hpp"
#include "bdie/mesh.hpp"
#include "bdie/parallel.hpp"
#include "bdie/quadrature.hpp"
#include "bdie/types.hpp"

namespace bdie {

/// Piecewise-constant density on surface panels (psi-type unknowns).
struct BoundaryDensity {
    Vector values;
};

/// Piecewise-constant density on volume cells (u-type unknowns).
struct DomainDensity {
    Vector values;
};

enum class AssemblyPath { direct, relation };

/// Dense target x source matrix for one discretized potential operator.
struct PotentialMatrix {
    Matrix m;
    std::string op;
    AssemblyPath path = AssemblyPath::direct;

    Vector apply(const Vector& density) const;

    /// Binary dump: two little-endian 8-byte unsigned dims, then row-major
    /// 8-byte reals.
    void dump(const std::string& file) const;
    static PotentialMatrix load(const std::string& file);
};

/// Collocation targets. self_element marks the source element whose singular
/// self-term the row needs (-1 for none): the panel index for boundary ops,
/// the cell index for volume ops.
struct Targets {
    std::vector<Vec3> points;
    std::vector<Vec3> normals;     // filled for centroid targets (needed by W')
    std::vector<int> self_element; // same length as points, or empty

    int count() const { return static_cast<int>(points.size()); }
    int self(int t) const { return self_element.empty() ? -1 : self_element[t]; }

    static Targets interior(std::vector<Vec3> pts);
    static Targets centroids(const SurfaceMesh& s);    // self = own panel
    static Targets barycenters(const VolumeMesh& v);   // self = own cell
    static Targets trace_points(const SurfaceMesh& s); // centroids, no self (volume ops)
};

// Surface potentials (targets x panels). Entries carry the defining signs:
// V rho = -int P rho dS, W rho = -int T_x P rho dS. The relation path
// evaluates the paper's Laplace-potential identities at the same quadrature
// points.

PotentialMatrix assemble_V(const SurfaceMesh& s, const Targets& targets,
                           const CoefficientField& field, const quad::SingularPolicy& policy,
                           AssemblyPath path = AssemblyPath::direct,
                           Execution exec = Execution::parallel);
PotentialMatrix assemble_W(const SurfaceMesh& s, const Targets& targets,
                           const CoefficientField& field, const quad::SingularPolicy& policy,
                           AssemblyPath path = AssemblyPath::direct,
                           Execution exec = Execution::parallel);

// Boundary direct values (centroid targets, self terms on the diagonal).
PotentialMatrix assemble_calV(const SurfaceMesh& s, const CoefficientField& field,
                              const quad::SingularPolicy& policy,
                              AssemblyPath path = AssemblyPath::direct,
                              Execution exec = Execution::parallel);
PotentialMatrix assemble_calW(const SurfaceMesh& s, const CoefficientField& field,
                              const quad::SingularPolicy& policy,
                              AssemblyPath path = AssemblyPath::direct,
                              Execution exec = Execution::parallel);
PotentialMatrix assemble_calWprime(const SurfaceMesh& s, const CoefficientField& field,
                                   const quad::SingularPolicy& policy,
                                   AssemblyPath path = AssemblyPath::direct,
                                   Execution exec = Execution::parallel);

// Volume potentials (targets x cells): P rho = int P rho dx, R rho = int R rho dx.
PotentialMatrix assemble_P(const VolumeMesh& v, const Targets& targets,
                           const CoefficientField& field, const quad::SingularPolicy& policy,
                           AssemblyPath path = AssemblyPath::direct,
                           Execution exec = Execution::parallel);
PotentialMatrix assemble_R(const VolumeMesh& v, const Targets& targets,
                           const CoefficientField& field, const quad::SingularPolicy& policy,
                           AssemblyPath path = AssemblyPath::direct,
                           Execution exec = Execution::parallel);

// Harmonic counterparts (a == 1 kernels, independent code path; oracles and
// the a == 1 reduction checks).
PotentialMatrix assemble_V_harmonic(const SurfaceMesh& s, const Targets& t,
                                    const quad::SingularPolicy& p);
PotentialMatrix assemble_W_harmonic(const SurfaceMesh& s, const Targets& t,
                                    const quad::SingularPolicy& p);
PotentialMatrix assemble_calV_harmonic(const SurfaceMesh& s, const quad::SingularPolicy& p);
PotentialMatrix assemble_calW_harmonic(const SurfaceMesh& s, const quad::SingularPolicy& p);
PotentialMatrix assemble_calWprime_harmonic(const SurfaceMesh& s, const quad::SingularPolicy& p);
PotentialMatrix assemble_P_harmonic(const VolumeMesh& v, const Targets& t,
                                    const quad::SingularPolicy& p);

// a(y)-parametrix variants for the kernel comparison study.
PotentialMatrix assemble_calV_py(const SurfaceMesh& s, const CoefficientField& field,
                                 const quad::SingularPolicy& p);
PotentialMatrix assemble_P_py(const VolumeMesh& v, const Targets& t,
                              const CoefficientField& field, const quad::SingularPolicy& p);
PotentialMatrix assemble_R_py(const VolumeMesh& v, const Targets& t,
                              const CoefficientField& field, const quad::SingularPolicy& p);

// Matrix-free application with the identical per-entry quadrature; used for
// right-hand sides and representation formulas where storing rows would not
// fit desk-scale memory.
enum class SurfOp { V, W };
enum class VolOp { P, R };

Vector apply_surface_potential(SurfOp op, const SurfaceMesh& s, const CoefficientField* field,
                               const quad::SingularPolicy& policy, const Vector& density,
                               const Targets& targets, Execution exec = Execution::parallel);
Vector apply_volume_potential(VolOp op, const VolumeMesh& v, const CoefficientField* field,
                              const quad::SingularPolicy& policy, const Vector& density,
                              const Targets& targets, Execution exec = Execution::parallel);

/// Interior gradient of the single-layer potential V psi (for conormal jump
/// checks): grad_y V psi (y) at strictly interior/exterior targets.
std::vector<Vec3> surface_single_layer_gradient(const SurfaceMesh& s,
                                                const CoefficientField& field,
                                                const quad::SingularPolicy& policy,
                                                const Vector& density, const Targets& targets);

/// Cell containing y (barycentric test with tolerance), or -1.
int find_containing_cell(const VolumeMesh& v, const Vec3& y);

} // namespace bdie

#endif
