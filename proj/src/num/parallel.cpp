#include "layerspec/num/parallel.hpp"

#include <cstdlib>
#include <string>

namespace layerspec::num {

unsigned default_thread_count() noexcept {
  if (const char* env = std::getenv("LAYERSPEC_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return static_cast<unsigned>(n);
    } catch (...) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

}  // namespace layerspec::num
