#include "pcf/error.hpp"

namespace pcf {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::invalid_argument: return "invalid_argument";
        case ErrorKind::empty_input: return "empty_input";
        case ErrorKind::resolution: return "resolution";
        case ErrorKind::aliasing: return "aliasing";
        case ErrorKind::dimension_mismatch: return "dimension_mismatch";
        case ErrorKind::grid_mismatch: return "grid_mismatch";
        case ErrorKind::factorization_domain: return "factorization_domain";
        case ErrorKind::convergence: return "convergence";
        case ErrorKind::singular_factor: return "singular_factor";
        case ErrorKind::infeasible_candidate: return "infeasible_candidate";
        case ErrorKind::infeasible_class: return "infeasible_class";
        case ErrorKind::numerical_inconsistency: return "numerical_inconsistency";
        case ErrorKind::horizon: return "horizon";
        case ErrorKind::io: return "io";
        case ErrorKind::parse: return "parse";
        case ErrorKind::verification: return "verification";
    }
    return "unknown";
}

}  // namespace pcf
