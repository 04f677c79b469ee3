#include <doctest.h>

#include <cmath>

#include "prandtl/error.hpp"
#include "prandtl/instability.hpp"

using namespace prandtl;

TEST_CASE("square-root law is recovered from synthetic rates") {
    const std::vector<int> ks = {16, 32, 64, 128, 256};
    std::vector<double> s;
    for (int k : ks) s.push_back(2.0 * std::sqrt(static_cast<double>(k)));
    const GrowthFit f = fit_sqrt_law(ks, s);
    CHECK(f.slope == doctest::Approx(0.5));
    CHECK(f.intercept == doctest::Approx(std::log(2.0)));
    CHECK(f.r2 == doctest::Approx(1.0));
    CHECK(f.reproduced);
    CHECK_FALSE(f.stable);
}

TEST_CASE("decaying rates are reported as stable") {
    const GrowthFit f = fit_sqrt_law({16, 32, 64, 128, 256}, {-1.0, -2.0, -3.0, 0.5, -4.0});
    CHECK(f.stable);
    CHECK_THROWS_AS(fit_sqrt_law({16, 32, 64, 128}, {1.0, 2.0, 3.0, 4.0}), ValidationError);
    CHECK_THROWS_AS(fit_sqrt_law({16, 32, 32, 128, 256}, {1.0, 2.0, 3.0, 4.0, 5.0}), ValidationError);
}

TEST_CASE("admissible horizon") {
    CHECK(admissible_horizon(0.25, 1.0, 1e-3) == doctest::Approx(0.25));
    CHECK(admissible_horizon(0.25, 4.0, 0.01) == doctest::Approx(0.12));
    CHECK(admissible_horizon(0.25, 0.0, 0.01) == doctest::Approx(0.25));
    CHECK(admissible_horizon(0.25, 1000.0, 1e-3) == 0.0);
}

TEST_CASE("a monotone erf shear does not amplify") {
    const Grid g(30.0, 512);
    const ModeGrowth r = mode_growth(g, erf_profile(g), 16, bump_shape(g, BumpSpec{}), 1e-3, 0.1);
    CHECK(r.sigma < 0.0);
    CHECK(r.t.size() == 101);
}
