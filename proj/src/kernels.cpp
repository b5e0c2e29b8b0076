#include "bdie/kernels.hpp"

namespace bdie::kernels {

std::string to_string(KernelId id) {
    switch (id) {
    case KernelId::laplace: return "laplace";
    case KernelId::parametrix_x: return "parametrix_x";
    case KernelId::parametrix_y: return "parametrix_y";
    case KernelId::remainder_x: return "remainder_x";
    case KernelId::remainder_y: return "remainder_y";
    case KernelId::conormal_x: return "conormal_x";
    case KernelId::laplace_conormal: return "laplace_conormal";
    }
    return "?";
}

} // namespace bdie::kernels
