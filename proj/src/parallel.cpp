#include "digeco/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace digeco {

namespace {
int g_workers = 0;
}

void set_worker_count(int workers) { g_workers = workers < 0 ? 0 : workers; }

int worker_count() {
  if (g_workers > 0) return g_workers;
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace digeco
