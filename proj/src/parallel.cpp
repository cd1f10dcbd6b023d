#include "fbmjs/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace fbmjs {

int worker_threads() {
  int threads = omp_get_max_threads();
  if (const char* env = std::getenv("FBM_THREADS"); env != nullptr && *env != '\0') {
    std::size_t used = 0;
    long cap = 0;
    try {
      cap = std::stol(env, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != std::string(env).size() || cap < 1) {
      throw std::invalid_argument("FBM_THREADS must be a positive integer, got '" + std::string(env) + "'");
    }
    if (cap < threads) threads = static_cast<int>(cap);
  }
  return threads;
}

}  // namespace fbmjs
