#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace pmuplace::kernels {

// Dense double-precision kernels used by the selection inner loops.
// All functions accept unaligned pointers; n may be 0.
struct Backend {
    const char* name;
    // acc[i] += row[i]
    void (*add_assign)(double* acc, const double* row, std::size_t n);
    // dst[i] = a[i] + b[i]   (dst must not alias a or b)
    void (*add_to)(double* dst, const double* a, const double* b, std::size_t n);
    // min_i (acc[i] + row[i]); +inf when n == 0
    double (*min_plus)(const double* acc, const double* row, std::size_t n);
    // min_i v[i]; +inf when n == 0
    double (*min_reduce)(const double* v, std::size_t n);
    // sum_i (a[i] - b[i])^2
    double (*sq_dist)(const double* a, const double* b, std::size_t n);
    // dst[i] = (a[i] - b[i])^2
    void (*abs_diff_sq)(double* dst, const double* a, const double* b, std::size_t n);
};

// Reference implementation (plain loops). Ground truth for equivalence tests.
const Backend& scalar();

// Backend selected at runtime: AVX2 where the CPU supports it, otherwise
// scalar. PMUPLACE_KERNELS=scalar|avx2 overrides the choice (ignored if the
// requested backend is unavailable).
const Backend& active();

// Every backend usable on this machine (scalar first).
const std::vector<const Backend*>& available();

// Force a backend by name; returns false if not available. Test hook.
bool force(std::string_view name);

}  // namespace pmuplace::kernels
