#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "kandistill/errors.hpp"
#include "kandistill/rng.hpp"
#include "kandistill/spline.hpp"
#include "support/gradcheck.hpp"

using namespace kandistill;

namespace {

// Independent straight-line hat evaluation for order-1 splines: basis i is
// the unit hat centered at domain_lo + i * h with half-width h.
double hat_oracle(const SplineGrid& g, int i, double x) {
    const double h = g.spacing();
    const double center = g.domain_lo + i * h;
    return std::max(0.0, 1.0 - std::fabs(x - center) / h);
}

// Sample a point at least 0.1 * h away from every knot.
double away_from_knots(const SplineGrid& g, Rng& rng) {
    const double h = g.spacing();
    const int cell = static_cast<int>(rng.below(static_cast<std::size_t>(g.grid_size)));
    return g.domain_lo + (cell + rng.uniform(0.1, 0.9)) * h;
}

} // namespace

TEST_CASE("grid construction and invariants") {
    const auto g = SplineGrid::make(0.0, 1.0, 4, 2);
    CHECK(g.knots.size() == 4 + 2 * 2 + 1);
    CHECK(g.basis_count() == 6);
    for (std::size_t i = 1; i < g.knots.size(); ++i) {
        CHECK(g.knots[i] > g.knots[i - 1]);
    }
    CHECK(g.knots[2] == doctest::Approx(0.0));
    CHECK(g.knots[6] == doctest::Approx(1.0));

    CHECK_THROWS_AS(SplineGrid::make(1.0, 1.0, 4, 2), InvalidArgument);
    CHECK_THROWS_AS(SplineGrid::make(2.0, 1.0, 4, 2), InvalidArgument);
    CHECK_THROWS_AS(SplineGrid::make(0.0, 1.0, 0, 2), InvalidArgument);
    CHECK_THROWS_AS(SplineGrid::make(0.0, 1.0, 4, -1), InvalidArgument);
}

TEST_CASE("order-0 basis is the cell indicator") {
    const auto g = SplineGrid::make(0.0, 1.0, 4, 0);
    const auto b = basis_values(g, 0.3);
    REQUIRE(b.size() == 4);
    for (int i = 0; i < 4; ++i) {
        CHECK(b[static_cast<std::size_t>(i)] == (i == 1 ? 1.0 : 0.0));
    }
    // Right domain edge falls in the last cell.
    const auto edge = basis_values(g, 1.0);
    CHECK(edge[3] == 1.0);
}

TEST_CASE("order-1 basis matches the hat-function oracle") {
    const auto g = SplineGrid::make(0.0, 1.0, 2, 1);
    REQUIRE(g.basis_count() == 3);
    const auto mid = basis_values(g, 0.5);
    CHECK(mid[0] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(mid[1] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(mid[2] == doctest::Approx(0.0).epsilon(1e-14));

    Rng rng(7);
    for (int t = 0; t < 200; ++t) {
        const double x = rng.uniform(0.0, 1.0);
        const auto b = basis_values(g, x);
        for (int i = 0; i < g.basis_count(); ++i) {
            CHECK(b[static_cast<std::size_t>(i)] ==
                  doctest::Approx(hat_oracle(g, i, x)).epsilon(1e-12));
        }
    }
}

TEST_CASE("partition of unity, non-negativity and local support") {
    Rng rng(11);
    const int configs[][2] = {{50, 1}, {50, 3}, {5, 3}, {1, 0}, {3, 2}, {10, 4}};
    for (const auto& cfg : configs) {
        const auto g = SplineGrid::make(-3.0, 3.0, cfg[0], cfg[1]);
        for (int t = 0; t < 1000; ++t) {
            const double x = rng.uniform(g.domain_lo, g.domain_hi);
            const auto b = basis_values(g, x);
            double sum = 0.0;
            int nonzero = 0;
            for (double v : b) {
                CHECK(v >= 0.0);
                sum += v;
                if (v != 0.0) ++nonzero;
            }
            CHECK(std::fabs(sum - 1.0) <= 1e-12);
            CHECK(nonzero <= g.order + 1);
        }
    }
}

TEST_CASE("out-of-domain inputs clamp to the boundary") {
    const auto g = SplineGrid::make(-3.0, 3.0, 10, 3);
    CHECK(basis_values(g, -17.0) == basis_values(g, -3.0));
    CHECK(basis_values(g, 42.0) == basis_values(g, 3.0));
    CHECK(basis_derivatives(g, 42.0) == basis_derivatives(g, 3.0));
}

TEST_CASE("non-finite input is rejected") {
    const auto g = SplineGrid::make(-3.0, 3.0, 10, 1);
    CHECK_THROWS_AS(basis_values(g, std::numeric_limits<double>::quiet_NaN()), InvalidArgument);
    CHECK_THROWS_AS(basis_values(g, std::numeric_limits<double>::infinity()), InvalidArgument);
    CHECK_THROWS_AS(basis_derivatives(g, std::numeric_limits<double>::quiet_NaN()), InvalidArgument);
}

TEST_CASE("order-0 derivatives vanish") {
    const auto g = SplineGrid::make(0.0, 1.0, 5, 0);
    const auto d = basis_derivatives(g, 0.37);
    for (double v : d) CHECK(v == 0.0);
}

TEST_CASE("derivatives sum to zero inside the domain") {
    Rng rng(13);
    const int configs[][2] = {{50, 1}, {50, 3}, {8, 2}, {5, 4}};
    for (const auto& cfg : configs) {
        const auto g = SplineGrid::make(-2.0, 2.0, cfg[0], cfg[1]);
        for (int t = 0; t < 200; ++t) {
            const auto d = basis_derivatives(g, rng.uniform(g.domain_lo, g.domain_hi));
            double sum = 0.0;
            for (double v : d) sum += v;
            CHECK(std::fabs(sum) <= 1e-10);
        }
    }
}

TEST_CASE("derivatives match central finite differences") {
    Rng rng(17);
    const int configs[][2] = {{50, 1}, {50, 3}, {7, 2}, {4, 3}, {12, 1}};
    for (const auto& cfg : configs) {
        const auto g = SplineGrid::make(-3.0, 3.0, cfg[0], cfg[1]);
        for (int t = 0; t < 50; ++t) {
            const double x = away_from_knots(g, rng);
            const auto analytic = basis_derivatives(g, x);
            for (int i = 0; i < g.basis_count(); ++i) {
                const auto idx = static_cast<std::size_t>(i);
                const double fd = testutil::central_diff(
                    [&](double u) { return basis_values(g, u)[idx]; }, x);
                CHECK(testutil::rel_err(analytic[idx], fd) <= 1e-4);
            }
        }
    }
}
