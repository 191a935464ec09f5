"""numba kernels: candidate tracker and per-path sampling loops."""
