#include "layerspec/error.hpp"

namespace layerspec {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_input: return "invalid-input";
    case ErrorKind::domain: return "domain";
    case ErrorKind::integration_failure: return "integration-failure";
    case ErrorKind::conjugate_point: return "conjugate-point";
    case ErrorKind::invalid_surface: return "invalid-surface";
    case ErrorKind::pole_singularity: return "pole-singularity";
    case ErrorKind::no_limit: return "no-limit";
    case ErrorKind::hypothesis_violation: return "hypothesis-violation";
    case ErrorKind::truncation: return "truncation";
    case ErrorKind::evaluation: return "evaluation";
    case ErrorKind::capability: return "capability";
    case ErrorKind::degenerate_pairing: return "degenerate-pairing";
    case ErrorKind::factorization: return "factorization";
    case ErrorKind::config: return "config";
  }
  return "unknown";
}

}  // namespace layerspec
