#include "qrelay/rng.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>

namespace qrelay {

unsigned worker_threads() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("QRELAY_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return hw;
}

}  // namespace qrelay
