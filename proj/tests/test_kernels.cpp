#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "pmuplace/kernels.hpp"

using namespace pmuplace;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n, double lo = 0.0,
                               double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(n);
    for (double& x : v) x = dist(rng);
    return v;
}

}  // namespace

TEST_CASE("scalar backend basics") {
    const auto& k = kernels::scalar();
    std::vector<double> acc{1.0, 2.0, 3.0};
    std::vector<double> row{0.5, -1.0, 0.25};
    CHECK(k.min_plus(acc.data(), row.data(), 3) == doctest::Approx(1.0));
    CHECK(k.min_reduce(acc.data(), 3) == 1.0);
    CHECK(k.sq_dist(acc.data(), row.data(), 3) == doctest::Approx(0.25 + 9.0 + 7.5625));
    k.add_assign(acc.data(), row.data(), 3);
    CHECK(acc[1] == 1.0);
    CHECK(k.min_reduce(acc.data(), 0) == std::numeric_limits<double>::infinity());
}

TEST_CASE("every available backend matches the scalar reference") {
    std::mt19937_64 rng(42);
    for (const kernels::Backend* b : kernels::available()) {
        CAPTURE(b->name);
        for (std::size_t n : {std::size_t{0}, std::size_t{1}, std::size_t{3}, std::size_t{4},
                              std::size_t{7}, std::size_t{8}, std::size_t{15}, std::size_t{16},
                              std::size_t{63}, std::size_t{190}, std::size_t{741}}) {
            const auto a = random_vec(rng, n);
            const auto c = random_vec(rng, n);

            // add/min kernels are elementwise exact: require equality
            CHECK(b->min_plus(a.data(), c.data(), n) ==
                  kernels::scalar().min_plus(a.data(), c.data(), n));
            CHECK(b->min_reduce(a.data(), n) == kernels::scalar().min_reduce(a.data(), n));

            std::vector<double> acc1 = a, acc2 = a;
            b->add_assign(acc1.data(), c.data(), n);
            kernels::scalar().add_assign(acc2.data(), c.data(), n);
            CHECK(acc1 == acc2);

            std::vector<double> dst1(n), dst2(n);
            b->add_to(dst1.data(), a.data(), c.data(), n);
            kernels::scalar().add_to(dst2.data(), a.data(), c.data(), n);
            CHECK(dst1 == dst2);

            b->abs_diff_sq(dst1.data(), a.data(), c.data(), n);
            kernels::scalar().abs_diff_sq(dst2.data(), a.data(), c.data(), n);
            CHECK(dst1 == dst2);

            // reduction order differs, allow rounding slack
            const double s1 = b->sq_dist(a.data(), c.data(), n);
            const double s2 = kernels::scalar().sq_dist(a.data(), c.data(), n);
            CHECK(s1 == doctest::Approx(s2).epsilon(1e-12));
        }
    }
}

TEST_CASE("min_plus picks the true minimum against a shuffled argmin position") {
    std::mt19937_64 rng(7);
    for (const kernels::Backend* b : kernels::available()) {
        for (int rep = 0; rep < 50; ++rep) {
            const std::size_t n = 1 + rng() % 257;
            auto a = random_vec(rng, n, 0.0, 10.0);
            auto c = random_vec(rng, n, 0.0, 10.0);
            const std::size_t pos = rng() % n;
            a[pos] = -5.0;
            c[pos] = 0.0;
            CHECK(b->min_plus(a.data(), c.data(), n) == -5.0);
        }
    }
}

TEST_CASE("backend forcing") {
    REQUIRE(kernels::force("scalar"));
    CHECK(std::string(kernels::active().name) == "scalar");
    CHECK_FALSE(kernels::force("not-a-backend"));
    // restore the default choice for other test binaries' sake
    for (const kernels::Backend* b : kernels::available()) kernels::force(b->name);
}
