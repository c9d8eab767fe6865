#include "elastowave/parallel.hpp"

#ifdef ELASTOWAVE_HAVE_OPENMP
#include <omp.h>
#endif

namespace elastowave {

namespace {
int g_threads = 0;
}

int thread_count() {
#ifdef ELASTOWAVE_HAVE_OPENMP
  return g_threads > 0 ? g_threads : omp_get_max_threads();
#else
  return 1;
#endif
}

void set_thread_count(int n) { g_threads = n > 0 ? n : 0; }

}  // namespace elastowave
