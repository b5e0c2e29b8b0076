#ifndef BDIE_ERRORS_HPP
#define BDIE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bdie {

/// Kernel evaluated at (or below) the minimum source/target separation.
/// On-diagonal handling belongs to the quadrature self-term paths.
struct SingularityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad user input: config file, coefficient positivity, level caps.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Operator assembly failed (sliver elements, unsupported kernel, ...).
struct AssemblyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Linear solve failed (singular to working precision, no convergence).
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Mesh file could not be parsed; message carries the line number.
struct MeshIoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace bdie

#endif
