#include <doctest.h>

#include <cmath>

#include "prandtl/error.hpp"
#include "prandtl/unknowns.hpp"

using namespace prandtl;

namespace {

struct Fixture {
    Grid g{30.0, 3001};
    ShearState sh;
    CutoffSet cuts;
    Fixture() {
        HeatSolver heat(g, canonical_profile(g), 1e-3);
        for (int i = 0; i < 20; ++i) heat.advance();
        sh = heat.state();
        cuts = build_cutoffs(g, 0.125, sh.a);
    }
};

double max_abs(const CProfile& f) {
    double m = 0.0;
    for (const auto& x : f) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

TEST_CASE("smoothstep ramp") {
    CHECK(ramp_up(-1.0, 0.0, 1.0).value == 0.0);
    CHECK(ramp_up(2.0, 0.0, 1.0).value == 1.0);
    CHECK(ramp_up(0.5, 0.0, 1.0).value == doctest::Approx(0.5));
    CHECK(ramp_up(1.0, 0.0, 2.0).d1 == doctest::Approx(630.0 / 256.0 / 2.0));
    const double h = 1e-5;
    for (double y : {0.2, 0.63, 0.9}) {
        const Ramp r = ramp_up(y, 0.0, 1.0);
        CHECK(r.d1 == doctest::Approx((ramp_up(y + h, 0.0, 1.0).value - ramp_up(y - h, 0.0, 1.0).value) / (2 * h)).epsilon(1e-6));
        CHECK(r.d2 == doctest::Approx((ramp_up(y + h, 0.0, 1.0).d1 - ramp_up(y - h, 0.0, 1.0).d1) / (2 * h)).epsilon(1e-5));
    }
}

TEST_CASE("cutoff invariants") {
    Fixture f;
    for (std::size_t i = 0; i < f.g.size(); ++i) {
        CHECK(f.cuts.phi1[i] >= 0.0);
        CHECK(f.cuts.phi1[i] <= 1.0);
        CHECK(f.cuts.phi3[i] >= 0.0);
        CHECK(f.cuts.phi3[i] <= 1.0);
        CHECK(f.cuts.varphi[i] >= 0.0);
    }
    CHECK(f.cuts.phi1_at(f.sh.a) == 0.0);
    CHECK(f.cuts.phi1_at(0.3) == 1.0);
    CHECK(f.cuts.psi2_at(1.0) == 1.0);
    CHECK(f.cuts.phi3_at(1.0) == 1.0);
    CHECK(f.cuts.phi3_at(0.3) == 0.0);
    CHECK(f.cuts.varphi_at(f.sh.a) == 0.0);
    CHECK_THROWS_AS(build_cutoffs(f.g, 0.2, 1.0), ValidationError);
    CHECK_THROWS_AS(build_cutoffs(f.g, 0.0, 1.0), ValidationError);
    CHECK_THROWS_AS(build_cutoffs(f.g, 0.1, 1.5), ValidationError);
}

TEST_CASE("the shear direction is in the kernel") {
    Fixture f;
    for (int k : {0, 1, 7}) {
        const SolutionState s = single_mode_state(k, CProfile(f.sh.dus.begin(), f.sh.dus.end()));
        const GoodUnknowns gu = good_unknowns(f.g, s, f.sh, f.cuts);
        const double scale = max_abs(s.modes[0].values);
        CHECK(max_abs(gu.modes[0].w1) / scale < 1e-10);
        CHECK(max_abs(gu.modes[0].w2) / scale < 1e-10);
        CHECK(max_abs(gu.modes[0].h1) / scale < 1e-10);
    }
}

TEST_CASE("w1 agrees with the derivative of u / dus") {
    Fixture f;
    const SolutionState s = single_mode_state(2, bump_shape(f.g, BumpSpec{1.4, 0.3, 0.05}));
    const ModeUnknowns m = good_unknowns(f.g, s, f.sh, f.cuts).modes[0];
    CProfile q(f.g.size());
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = s.modes[0].values[i] / f.sh.dus[i];
    const std::size_t i = f.g.nearest(1.6);
    const Complex dq = (q[i + 1] - q[i - 1]) / (2.0 * f.g.spacing());
    CHECK(std::abs(dq - m.w1[i]) < 1e-2 * std::abs(m.w1[i]));
    // h = d u_y with d = phi3 / sqrt(d2us).
    const Profile d = weight_d(f.sh, f.cuts);
    CHECK(d[i] == doctest::Approx(f.cuts.phi3[i] / std::sqrt(f.sh.d2us[i])));
}

TEST_CASE("forcing identities hold to second order") {
    // Product rules fail discretely at O(dy^2), so check the rate.
    std::vector<double> f2_gap, red_gap, f1_gap;
    for (std::size_t ny : {1501, 3001}) {
        const Grid g(30.0, ny);
        HeatSolver heat(g, canonical_profile(g), 1e-3);
        for (int i = 0; i < 20; ++i) heat.advance();
        const ShearState& sh = heat.state();
        const CutoffSet cuts = build_cutoffs(g, 0.125, sh.a);
        const ModeField m{3, bump_shape(g, BumpSpec{1.3, 0.3, 0.05})};
        const F2Result f2 = forcing_F2(g, m, sh);
        double worst = 0.0, gap = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (g.y(i) < 0.3 || g.y(i) > 5.0) continue;
            worst = std::max(worst, std::abs(f2.identity_lhs[i] - f2.identity_rhs[i]));
            gap = std::max(gap, std::abs(f2.reduced[i] - f2.defining[i]));
        }
        f2_gap.push_back(worst / max_abs(f2.identity_rhs));
        red_gap.push_back(gap / max_abs(f2.reduced));
        const F1Result f1 = forcing_F1(g, m, sh, cuts);
        double d1 = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            if (cuts.phi1[i] >= 1.0 && g.y(i) > 0.3 && g.y(i) < 5.0) d1 = std::max(d1, std::abs(f1.F1[i] - f1.defining[i]));
        f1_gap.push_back(d1 / max_abs(f1.F1));
    }
    CHECK(f2_gap[0] < 5e-2);
    CHECK(f2_gap[0] / f2_gap[1] > 3.4);
    CHECK(red_gap[0] / red_gap[1] > 3.4);
    CHECK(f1_gap[0] / f1_gap[1] > 3.4);
}

TEST_CASE("decomposition reconstructs u") {
    Fixture f;
    const SolutionState s = single_mode_state(3, bump_shape(f.g, BumpSpec{1.5, 0.5, 0.05}));
    const Decomposition d = decompose_u(f.g, s, f.sh, f.cuts);
    CHECK(d.modes[0].reconstruction_error < 1e-6);
    CHECK(f.g.y(d.a_cell) <= f.sh.a);
    CHECK(f.g.y(d.a_cell + 1) >= f.sh.a);
}

TEST_CASE("unknowns reject a shear without the structural clauses") {
    const Grid g(30.0, 1024);
    const ShearState sh = make_shear_state(g, 0.0, erf_profile(g).u0);
    CutoffSet cuts = build_cutoffs(g, 0.125, 1.0);
    CHECK_THROWS_AS(good_unknowns(g, single_mode_state(1, bump_shape(g, BumpSpec{})), sh, cuts), ValidationError);
}
