#include <doctest.h>

#include <cmath>

#include "prandtl/error.hpp"
#include "prandtl/grid.hpp"

using namespace prandtl;

namespace {

double max_error(const Grid& g, const Profile& approx, double (*exact)(double)) {
    double e = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) e = std::max(e, std::abs(approx[i] - exact(g.y(i))));
    return e;
}

double f(double y) { return std::sin(2.0 * y) * std::exp(-0.3 * y); }
double df(double y) { return std::exp(-0.3 * y) * (2.0 * std::cos(2.0 * y) - 0.3 * std::sin(2.0 * y)); }
double d2f(double y) {
    return std::exp(-0.3 * y) * (-3.91 * std::sin(2.0 * y) - 1.2 * std::cos(2.0 * y));
}

}  // namespace

TEST_CASE("grid rejects degenerate sizes") {
    CHECK_THROWS_AS(Grid(1.0, 4), ValidationError);
    CHECK_THROWS_AS(Grid(-1.0, 10), ValidationError);
    const Grid g(2.0, 5);
    CHECK(g.spacing() == doctest::Approx(0.5));
    CHECK(g.y(4) == 2.0);
    CHECK(g.nearest(0.74) == 1);
    CHECK(g.floor_index(0.99) == 1);
    CHECK(g.nearest(100.0) == 4);
}

TEST_CASE("second-order differences converge at order two") {
    double prev1 = 0.0, prev2 = 0.0;
    for (std::size_t n : {101, 201, 401}) {
        const Grid g(5.0, n);
        const Profile u = sample(g, f);
        const double e1 = max_error(g, diff1(g, u), df), e2 = max_error(g, diff2(g, u), d2f);
        if (prev1 > 0.0) {
            CHECK(std::log2(prev1 / e1) == doctest::Approx(2.0).epsilon(0.1));
            CHECK(std::log2(prev2 / e2) > 0.9);  // one-sided ends are first order for diff2
        }
        prev1 = e1;
        prev2 = e2;
    }
}

TEST_CASE("fourth-order stencils converge at order four") {
    double prev = 0.0;
    for (std::size_t n : {101, 201}) {
        const Grid g(5.0, n);
        const Profile u = sample(g, f);
        const double e = max_error(g, hi::diff1<double>(g, u), df);
        if (prev > 0.0) CHECK(std::log2(prev / e) > 3.5);
        prev = e;
    }
}

TEST_CASE("trapezoidal integrals") {
    const Grid g(10.0, 2001);
    const Profile u = sample(g, [](double y) { return std::exp(-y); });
    CHECK(integrate<double>(g, u) == doctest::Approx(1.0 - std::exp(-10.0)).epsilon(1e-5));
    CHECK(integrate<double>(g, u, 1.0, 2.0) == doctest::Approx(std::exp(-1.0) - std::exp(-2.0)).epsilon(1e-5));
    const Profile F = cumulative_integral<double>(g, u);
    CHECK(F[0] == 0.0);
    CHECK(F[1000] == doctest::Approx(1.0 - std::exp(-5.0)).epsilon(1e-5));
    const Profile H = hi::cumulative_integral<double>(g, u);
    CHECK(std::abs(H[1000] - (1.0 - std::exp(-5.0))) < 1e-10);
    CHECK_THROWS(integrate<double>(g, u, 2.0, 1.0));
}

TEST_CASE("cubic interpolation is exact on cubics") {
    const Grid g(3.0, 31);
    const Profile u = sample(g, [](double y) { return y * y * y - 2.0 * y + 1.0; });
    for (double y : {0.05, 1.234, 2.96}) {
        const InterpValue v = interpolate(g, u, y);
        CHECK(v.value == doctest::Approx(y * y * y - 2.0 * y + 1.0).epsilon(1e-12));
        CHECK(v.slope == doctest::Approx(3.0 * y * y - 2.0).epsilon(1e-10));
    }
}

TEST_CASE("tridiagonal solve reproduces the right-hand side") {
    const std::vector<double> sub = {0.0, -1.0, -1.0, -1.0}, sup = {-1.0, -1.0, -1.0, 0.0};
    std::vector<double> diag = {4.0, 4.0, 4.0, 4.0}, x = {1.0, 2.0, 3.0, 4.0};
    const std::vector<double> b = x;
    solve_tridiagonal<double>(sub, diag, sup, x);
    for (std::size_t i = 0; i < 4; ++i) {
        double r = 4.0 * x[i];
        if (i > 0) r -= x[i - 1];
        if (i < 3) r -= x[i + 1];
        CHECK(r == doctest::Approx(b[i]).epsilon(1e-14));
    }
}

TEST_CASE("L2 norm of a known profile") {
    const Grid g(20.0, 4001);
    const Profile u = sample(g, [](double y) { return std::exp(-y); });
    CHECK(l2_norm(g, std::span<const double>(u)) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-5));
}
