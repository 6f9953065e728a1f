#include "dpm/parallel.hpp"

#ifdef DPM_HAVE_OPENMP
#include <omp.h>
#endif

namespace dpm {

#ifdef DPM_HAVE_OPENMP
namespace {
const int kDefaultThreads = omp_get_max_threads();
}

int kernel_threads() { return omp_get_max_threads(); }

void set_kernel_threads(int threads) {
  omp_set_num_threads(threads < 1 ? kDefaultThreads : threads);
}

bool parallel_kernels_available() { return true; }
#else
int kernel_threads() { return 1; }
void set_kernel_threads(int) {}
bool parallel_kernels_available() { return false; }
#endif

}  // namespace dpm
