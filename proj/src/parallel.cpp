#include "dilation/parallel.hpp"

#include <cstdlib>
#include <string>

namespace dilation {

namespace {

int env_threads() {
  const char* raw = std::getenv("DILATION_THREADS");
  if (raw == nullptr) return 0;
  try {
    const int value = std::stoi(raw);
    return value > 0 ? value : 0;
  } catch (...) {
    return 0;
  }
}

}  // namespace

int thread_count() {
  const int requested = env_threads();
  return requested > 0 ? requested : omp_get_max_threads();
}

void configure_threads_from_env() {
  if (const int requested = env_threads(); requested > 0) omp_set_num_threads(requested);
}

}  // namespace dilation
