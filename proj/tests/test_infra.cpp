#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "qhl/grid_series.hpp"
#include "qhl/parallel.hpp"
#include "qhl/quadrature.hpp"
#include "qhl/rng.hpp"

using namespace qhl;

TEST_CASE("rng streams are deterministic and well spread") {
    Rng a(42), b(42), c(43);
    bool same = true, differ = false;
    for (int i = 0; i < 64; ++i) {
        auto x = a.next_u64();
        same &= (x == b.next_u64());
        differ |= (x != c.next_u64());
    }
    CHECK(same);
    CHECK(differ);

    Rng r(7);
    double mn = 1.0, mx = 0.0, acc = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        double u = r.uniform();
        mn = std::min(mn, u);
        mx = std::max(mx, u);
        acc += u;
    }
    CHECK(mn > 0.0);
    CHECK(mx < 1.0);
    CHECK(acc / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("normal draws have the right first moments") {
    Rng r(11);
    double s = 0.0, s2 = 0.0;
    const int n = 400000;
    for (int i = 0; i < n; ++i) {
        double z = r.normal();
        s += z;
        s2 += z * z;
    }
    CHECK(std::abs(s / n) < 0.01);
    CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("derive_seed separates streams and indices") {
    CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 2, 4));
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 3));
    CHECK(derive_seed(2, 2, 3) != derive_seed(1, 2, 3));
}

TEST_CASE("parallel loop matches the serial reference bit for bit") {
    const std::size_t n = 257;
    std::vector<double> a(n), b(n);
    auto job = [](std::size_t i) {
        Rng r(derive_seed(99, 1, i));
        double acc = 0.0;
        for (int k = 0; k < 100; ++k) acc += r.normal();
        return acc;
    };
    for_each_index_serial(n, [&](std::size_t i) { a[i] = job(i); });
    for_each_index(n, 2, [&](std::size_t i) { b[i] = job(i); });
    CHECK(a == b);
}

TEST_CASE("parallel loop propagates exceptions") {
    CHECK_THROWS_AS(
        for_each_index(64, 2,
                       [](std::size_t i) {
                           if (i == 13) throw ParameterError("boom");
                       }),
        ParameterError);
}

TEST_CASE("grid series arithmetic enforces matching grids") {
    GridSeries a(0.0, 0.5, {0.0, 1.0, 2.0});
    GridSeries b(0.0, 0.5, {1.0, 1.0, 1.0});
    GridSeries c(0.0, 0.25, {1.0, 1.0, 1.0});
    auto s = a + b;
    CHECK(s[2] == 3.0);
    CHECK_THROWS_AS(a += c, ParameterError);
    CHECK(a.sup_gap(b) == 1.0);
    CHECK_THROWS_AS(GridSeries(0.0, 0.5, {1.0}), ParameterError);
    CHECK_THROWS_AS(GridSeries(0.0, -1.0, {1.0, 2.0}), ParameterError);
}

TEST_CASE("cumulative integral is the running trapezoid") {
    GridSeries v = GridSeries::zeros(0.0, 1.0, 101);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = v.time(i);  // integrand t
    auto c = v.cumulative_integral();
    CHECK(c[100] == doctest::Approx(0.5).epsilon(1e-12));  // trapezoid exact for linear
}

TEST_CASE("quadrature handles smooth, singular and infinite ranges") {
    CHECK(integrate([](double x) { return x * x; }, 0.0, 1.0) ==
          doctest::Approx(1.0 / 3).epsilon(1e-10));
    // integrable endpoint singularity
    CHECK(integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0) ==
          doctest::Approx(2.0).epsilon(1e-8));
    CHECK(integrate_to_inf([](double x) { return std::exp(-2.0 * x); }, 0.0) ==
          doctest::Approx(0.5).epsilon(1e-10));
    CHECK_THROWS_AS(integrate([](double) { return 1.0; }, 1.0, 0.0), ParameterError);
}
