#include "pmuplace/kernels.hpp"

#include <cstdlib>
#include <limits>
#include <mutex>

namespace pmuplace::kernels {

#if defined(PMUPLACE_HAVE_AVX2)
// defined in kernels_avx2.cpp
const Backend& avx2_backend();
bool avx2_supported();
#endif

namespace {

void add_assign_scalar(double* acc, const double* row, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) acc[i] += row[i];
}

void add_to_scalar(double* dst, const double* a, const double* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = a[i] + b[i];
}

double min_plus_scalar(const double* acc, const double* row, std::size_t n) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double v = acc[i] + row[i];
        if (v < m) m = v;
    }
    return m;
}

double min_reduce_scalar(const double* v, std::size_t n) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
        if (v[i] < m) m = v[i];
    return m;
}

double sq_dist_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

void abs_diff_sq_scalar(double* dst, const double* a, const double* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        dst[i] = d * d;
    }
}

constexpr Backend kScalar = {
    "scalar",         add_assign_scalar, add_to_scalar,
    min_plus_scalar,  min_reduce_scalar, sq_dist_scalar,
    abs_diff_sq_scalar,
};

const Backend* g_active = nullptr;
std::once_flag g_init;

void init_active() {
    const Backend* pick = &kScalar;
#if defined(PMUPLACE_HAVE_AVX2)
    if (avx2_supported()) pick = &avx2_backend();
#endif
    if (const char* env = std::getenv("PMUPLACE_KERNELS")) {
        for (const Backend* b : available())
            if (std::string_view(env) == b->name) pick = b;
    }
    g_active = pick;
}

}  // namespace

const Backend& scalar() { return kScalar; }

const std::vector<const Backend*>& available() {
    static const std::vector<const Backend*> list = [] {
        std::vector<const Backend*> v{&kScalar};
#if defined(PMUPLACE_HAVE_AVX2)
        if (avx2_supported()) v.push_back(&avx2_backend());
#endif
        return v;
    }();
    return list;
}

const Backend& active() {
    std::call_once(g_init, init_active);
    return *g_active;
}

bool force(std::string_view name) {
    std::call_once(g_init, init_active);
    for (const Backend* b : available()) {
        if (name == b->name) {
            g_active = b;
            return true;
        }
    }
    return false;
}

}  // namespace pmuplace::kernels
