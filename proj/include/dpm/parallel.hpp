#pragma once

namespace dpm {

/// Number of worker threads the per-pixel kernels may use (1 when the
/// library was built without OpenMP).
int kernel_threads();

/// Caps kernel threads; values < 1 restore the runtime default.
void set_kernel_threads(int threads);

bool parallel_kernels_available();

}  // namespace dpm
