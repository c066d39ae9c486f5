#include "cjm/errors.hpp"
#include "cjm/spectral.hpp"

#include "dense_oracle.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace cjm;

namespace {

GridPtr cart(int n, int ghost) {
    return make_uniform_grid(n, CoordinateSystem::cartesian(), ghost);
}

// Brute-force maximum of |prod (1 - w k)| on a uniform sample of [lo, hi].
double sampled_max(const std::vector<double>& w, double lo, double hi, int samples = 10000) {
    double m = 0.0;
    for (int s = 0; s < samples; ++s) {
        const double k = lo + (hi - lo) * s / (samples - 1);
        // Sum of logs: long schedules overflow a plain running product.
        double lg = 0.0;
        for (double x : w) lg += std::log(std::abs(1.0 - x * k));
        m = std::max(m, std::exp(lg));
    }
    return m;
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("analytic bounds, frozen values") {
    // High-precision evaluations of the closed forms.
    CHECK(bounds_5pt(8, 8).kappa_min == doctest::Approx(0.076120467488713244).epsilon(1e-14));
    CHECK(bounds_5pt(1024, 1024).kappa_min == doctest::Approx(4.7061904238284884e-6).epsilon(1e-12));
    CHECK(bounds_9pt(32, 32).kappa_min == doctest::Approx(0.0057736906219194461).epsilon(1e-13));
    CHECK(bounds_9pt(1024, 1024).kappa_min == doctest::Approx(5.647424078948525e-6).epsilon(1e-12));
    CHECK(bounds_17pt(16, 16).kappa_min == doctest::Approx(0.01850369752988504).epsilon(1e-13));
    CHECK(bounds_17pt(1024, 1024).kappa_min == doctest::Approx(4.5179463505696412e-6).epsilon(1e-12));
    CHECK(bounds_5pt(8, 16).kappa_min == doctest::Approx(0.047667593542741397).epsilon(1e-14));
    CHECK(bounds_9pt(8, 16).kappa_min == doctest::Approx(0.056908585563615549).epsilon(1e-14));
    CHECK(bounds_17pt(8, 16).kappa_min == doctest::Approx(0.04623921273230801).epsilon(1e-14));
}

TEST_CASE("kappa_max constants") {
    for (int n : {2, 8, 100, 1024}) {
        CHECK(bounds_5pt(n, n).kappa_max == 2.0);
        CHECK(bounds_9pt(n, n + 3).kappa_max == 8.0 / 5.0);
        CHECK(bounds_17pt(n + 1, n).kappa_max == 128.0 / 75.0);
    }
}

TEST_CASE("square-grid reductions") {
    const double pi = std::acos(-1.0);
    for (int n : {4, 16, 100}) {
        const double s1 = std::sin(pi / (2 * n));
        const double s2 = std::sin(pi / n);
        CHECK(bounds_5pt(n, n).kappa_min == doctest::Approx(2 * s1 * s1).epsilon(1e-14));
        CHECK(bounds_9pt(n, n).kappa_min == doctest::Approx(1.6 * s1 * s1 + 0.2 * s2 * s2).epsilon(1e-14));
    }
}

TEST_CASE("kappa_min decreases with n, M increases") {
    for (StencilKind k : {StencilKind::Five, StencilKind::Nine, StencilKind::Seventeen}) {
        double prev = 1e9;
        int prev_m = 0;
        for (int n = 4; n <= 2048; n *= 2) {
            const auto b = analytic_bounds(k, n, n);
            CHECK(b.kappa_min < prev);
            prev = b.kappa_min;
            const int m = schedule(b, 1e-6).m_count;
            CHECK(m > prev_m);
            prev_m = m;
        }
    }
}

TEST_CASE("bounds validation") {
    CHECK_THROWS_AS(bounds_5pt(1, 8), ConfigError);
    CHECK_THROWS_AS(make_bounds(0.0, 1.0), ConfigError);
    CHECK_THROWS_AS(make_bounds(0.5, 0.5), ConfigError);
    CHECK_THROWS_AS(make_bounds(0.5, 2.5), ConfigError);
    CHECK_NOTHROW(make_bounds(0.5, 2.0));
}

TEST_CASE("5- and 9-point formulas are exact eigenvalues") {
    for (int n : {8, 16}) {
        const auto e5 = oracle::cartesian_kappa(cartesian_5pt(), *cart(n, 1));
        CHECK(e5.kmin == doctest::Approx(bounds_5pt(n, n).kappa_min).epsilon(1e-10));
        CHECK(e5.kmax < 2.0);
        const auto e9 = oracle::cartesian_kappa(cartesian_9pt(), *cart(n, 1));
        CHECK(e9.kmin == doctest::Approx(bounds_9pt(n, n).kappa_min).epsilon(1e-10));
        CHECK(e9.kmax <= 1.6);
    }
}

TEST_CASE("numeric bounds agree with the formulas") {
    for (int n : {8, 16, 32}) {
        CAPTURE(n);
        const auto n5 = bounds_numeric(compile(cartesian_5pt(), cart(n, 1)));
        CHECK(n5.kappa_min == doctest::Approx(bounds_5pt(n, n).kappa_min).epsilon(1e-6));
        const auto n9 = bounds_numeric(compile(cartesian_9pt(), cart(n, 1)));
        CHECK(n9.kappa_min == doctest::Approx(bounds_9pt(n, n).kappa_min).epsilon(1e-6));

        // With two analytic ghost layers the 17-point operator is not
        // diagonalised by sine modes; the closed form is a lower bound that
        // tightens as n grows.
        const auto n17 = bounds_numeric(compile(cartesian_17pt(), cart(n, 2)));
        const auto a17 = bounds_17pt(n, n);
        CHECK(n17.kappa_min >= a17.kappa_min);
        CHECK(n17.kappa_min <= a17.kappa_min * (1.0 + 0.4 / n));
        CHECK(n17.kappa_max <= a17.kappa_max);
    }
}

TEST_CASE("numeric bounds match the dense oracle") {
    const auto g = cart(16, 2);
    const auto ref = oracle::cartesian_kappa(cartesian_17pt(), *g);
    const auto num = bounds_numeric(compile(cartesian_17pt(), g));
    CHECK(num.kappa_min == doctest::Approx(ref.kmin).epsilon(1e-8));
    CHECK(num.kappa_max == doctest::Approx(ref.kmax).epsilon(1e-8));

    const auto pg = make_uniform_grid(16, CoordinateSystem::polar({1.0, 2.0}, {0.0, 1.0}), 1);
    const auto pref = oracle::general_kappa(polar_5pt(), *pg);
    const auto pnum = bounds_numeric(compile(polar_5pt(), pg));
    CHECK(pnum.kappa_min > 0.0);
    CHECK(pnum.kappa_max <= 2.0);
    CHECK(pnum.kappa_min == doctest::Approx(pref.kmin).epsilon(1e-6));
    CHECK(pnum.kappa_max == doctest::Approx(pref.kmax).epsilon(1e-6));
}

TEST_CASE("power iteration budget") {
    PowerIterationOptions opts;
    opts.max_iterations = 5;
    CHECK_THROWS_AS(bounds_numeric(compile(cartesian_5pt(), cart(16, 1)), opts), ConvergenceError);
}

TEST_CASE("schedule examples") {
    SUBCASE("(0.5, 1.5) at 1e-3") {
        const auto b = make_bounds(0.5, 1.5);
        CHECK(b.mu() == 2.0);
        const auto s = schedule(b, 1e-3);
        CHECK(s.m_count == 6);
        CHECK(sampled_max(s.weights, 0.5, 1.5) <= 1e-3);
    }
    SUBCASE("single weight at the midpoint") {
        const auto b = make_bounds(0.5, 1.5);
        const auto s = schedule(b, 0.9);
        CHECK(s.m_count == 1);
        CHECK(s.weights[0] == doctest::Approx(2.0 / (0.5 + 1.5)).epsilon(1e-15));
    }
    SUBCASE("invalid tolerance") {
        const auto b = make_bounds(0.5, 1.5);
        CHECK_THROWS_AS(schedule(b, 0.0), ConfigError);
        CHECK_THROWS_AS(schedule(b, 1.0), ConfigError);
        CHECK_THROWS_AS(schedule(b, -1e-3), ConfigError);
        CHECK_THROWS_AS(chebyshev_schedule(b, 0), ConfigError);
    }
}

TEST_CASE("weights ascend inside (1/kappa_max, 1/kappa_min)") {
    for (int n : {8, 64, 512}) {
        const auto b = bounds_9pt(n, n);
        const auto s = schedule(b, 1e-8);
        CHECK(std::adjacent_find(s.weights.begin(), s.weights.end(), std::greater_equal<>()) == s.weights.end());
        CHECK(s.weights.front() > 1.0 / b.kappa_max);
        CHECK(s.weights.back() < 1.0 / b.kappa_min);
        // The application order is a permutation of the weights.
        std::vector<int> ord = s.order;
        std::sort(ord.begin(), ord.end());
        std::vector<int> iota(ord.size());
        std::iota(iota.begin(), iota.end(), 0);
        CHECK(ord == iota);
    }
}

TEST_CASE("damping bound and optimality on random intervals") {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> lo(1e-3, 0.5);
    std::uniform_real_distribution<double> width(0.1, 1.4);
    std::uniform_real_distribution<double> logtol(-10.0, -1.0);
    for (int t = 0; t < 20; ++t) {
        const double kmin = lo(rng);
        const double kmax = std::min(2.0, kmin + width(rng));
        const double tol = std::pow(10.0, logtol(rng));
        CAPTURE(kmin);
        CAPTURE(kmax);
        CAPTURE(tol);
        const auto s = schedule(make_bounds(kmin, kmax), tol);
        CHECK(sampled_max(s.weights, kmin, kmax) <= tol * (1.0 + 1e-10));
        if (s.m_count > 1) {
            const auto shorter = chebyshev_schedule(make_bounds(kmin, kmax), s.m_count - 1);
            CHECK(sampled_max(shorter.weights, kmin, kmax) > tol);
        }
        // Equioscillation at both ends of the interval.
        const double bound = s.damping_bound();
        CHECK(std::abs(damping_factor(s.weights, kmin)) == doctest::Approx(bound).epsilon(1e-10));
        CHECK(std::abs(damping_factor(s.weights, kmax)) == doctest::Approx(bound).epsilon(1e-10));
    }
}

TEST_CASE("damping factor in log space") {
    const std::vector<double> w{0.5, 2.0, 4.0};
    CHECK(damping_factor(w, 1.0) == doctest::Approx(0.5 * -1.0 * -3.0));
    CHECK(damping_factor(w, 0.5) == 0.0);
    // A long schedule stays finite where the naive product would overflow in
    // the middle and come back down.
    const auto s = schedule(bounds_5pt(2048, 2048), 1e-8);
    CHECK(s.m_count > 5000);
    for (double k : {bounds_5pt(2048, 2048).kappa_min, 0.1, 1.0, 1.999}) {
        const double d = damping_factor(s.weights, k);
        CHECK(std::isfinite(d));
        CHECK(std::abs(d) <= s.damping_bound() * (1.0 + 1e-8));
    }
}

TEST_CASE("Chebyshev polynomial") {
    CHECK(chebyshev_t(0, 0.3) == 1.0);
    CHECK(chebyshev_t(1, 0.3) == doctest::Approx(0.3));
    CHECK(chebyshev_t(2, 0.3) == doctest::Approx(2 * 0.09 - 1));
    CHECK(chebyshev_t(3, 2.0) == doctest::Approx(4 * 8 - 3 * 2));
    CHECK(chebyshev_t(3, -2.0) == doctest::Approx(-26.0));
    CHECK_THROWS_AS(chebyshev_t(-1, 0.5), ConfigError);
}

TEST_CASE("Leja ordering") {
    const std::vector<double> pts{-0.9, -0.3, 0.2, 0.95};
    const auto ord = leja_order(pts);
    REQUIRE(ord.size() == 4);
    CHECK(ord[0] == 3);
    CHECK(ord[1] == 0);
    CHECK(leja_order(std::vector<double>{}).empty());
    // Tie on magnitude goes to the lower index.
    CHECK(leja_order(std::vector<double>{-1.0, 1.0}).front() == 0);
}

}  // TEST_SUITE
