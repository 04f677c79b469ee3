// One line per acceptance criterion. Exit status is the number of failures.
#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>
#include <string>
#include <vector>

#include "prandtl/config.hpp"
#include "prandtl/gevrey.hpp"
#include "prandtl/instability.hpp"
#include "prandtl/unknowns.hpp"

using namespace prandtl;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void report(int id, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    fmt::print("criterion {:2d} {} {} [{:.1f} s]\n", id, o.pass ? "PASS" : "FAIL", o.detail, secs);
    std::fflush(stdout);
}

double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double max_abs(const CProfile& f) {
    double m = 0.0;
    for (const auto& x : f) m = std::max(m, std::abs(x));
    return m;
}

Outcome heat_oracle_agreement() {
    const auto t0 = std::chrono::steady_clock::now();
    const Grid g(30.0, 2048);
    const ShearProfile p = canonical_profile(g);
    const auto states = heat_solve(g, p, 1e-4, 0.5, 500);
    double err = 0.0;
    for (const auto& s : states)
        for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(s.us[i] - heat_oracle(g, p, s.t, g.y(i))));
    const double secs = elapsed(t0);
    return {err <= 1e-4 && secs < 30.0, fmt::format("max |us - oracle| = {:.3e} on {} times, {:.1f} s", err, states.size(), secs)};
}

Outcome erf_exactness() {
    const auto t0 = std::chrono::steady_clock::now();
    // The erf layer at t0 is thin; the spatial error dominates at ny = 2048.
    const Grid g(30.0, 4096);
    const double t_off = 0.01;
    const ShearProfile p = erf_profile(g, t_off);
    const auto states = heat_solve(g, p, 1e-4, 0.5, 100);
    double err = 0.0;
    for (const auto& s : states)
        for (std::size_t i = 0; i < g.size(); ++i)
            err = std::max(err, std::abs(s.us[i] - std::erf(g.y(i) / (2.0 * std::sqrt(s.t + t_off)))));
    const double secs = elapsed(t0);
    return {err <= 1e-4 && secs < 10.0, fmt::format("max |us - erf| = {:.3e}, {:.1f} s", err, secs)};
}

Outcome assumption_validation() {
    const Grid g(30.0, 3001);
    const ShearProfile p = canonical_profile(g);
    const AssumptionReport rep = validate_assumptions(g, p);
    const auto states = heat_solve(g, p, 1e-3, 0.5);
    const ShearParams sp{0.125, 0.125};
    const PersistenceResult pr = persistence_window(g, states, sp);
    const CriticalPointTrack track = track_critical_point(g, states, sp);
    double worst_shift = 0.0;
    for (const auto& s : track.samples)
        if (s.t <= pr.T1) worst_shift = std::max(worst_shift, std::abs(s.a - 1.0));
    const bool ok = rep.all_pass() && pr.T1 > 0.0 && track.max_residual <= 1e-10 && worst_shift <= 0.25;
    return {ok, fmt::format("clauses {}, min d2u0 on [1/2,2] = {:.4f}, T1 = {}, max a residual = {:.1e}, max |a-1| = {:.4f}",
                            rep.all_pass() ? "all pass" : "FAIL", rep.min_convexity, pr.T1, track.max_residual,
                            worst_shift)};
}

Outcome kernel_identities() {
    const Grid g(30.0, 3001);
    const ShearProfile p = canonical_profile(g);
    HeatSolver heat(g, p, 1e-3);
    for (int i = 0; i < 50; ++i) heat.advance();
    const ShearState& sh = heat.state();
    const CutoffSet cuts = build_cutoffs(g, 0.125, sh.a);
    double kernel = 0.0;
    for (int k : {0, 3}) {
        SolutionState s = single_mode_state(k, CProfile(sh.dus.begin(), sh.dus.end()));
        const double scale = max_abs(s.modes[0].values);
        const GoodUnknowns gu = good_unknowns(g, s, sh, cuts);
        const auto& m = gu.modes[0];
        kernel = std::max({kernel, max_abs(m.w1) / scale, max_abs(m.w2) / scale, max_abs(m.h1) / scale});
    }
    // w2 = dus^2 w1 for a generic datum on the monotone core.
    SolutionState s = single_mode_state(5, bump_shape(g, BumpSpec{1.5, 0.4, 0.05}));
    const GoodUnknowns gu = good_unknowns(g, s, sh, cuts);
    const auto& m = gu.modes[0];
    double core = 0.0;
    const double scale = max_abs(m.w2);
    for (std::size_t i = 0; i < g.size(); ++i)
        if (cuts.phi1[i] >= 1.0) core = std::max(core, std::abs(m.w2[i] - sh.dus[i] * sh.dus[i] * m.w1[i]) / scale);
    return {kernel <= 1e-10 && core <= 1e-10,
            fmt::format("kernel max(|w1|,|w2|,|h1|)/|u| = {:.2e}, |w2 - dus^2 w1| rel = {:.2e}", kernel, core)};
}

Outcome decomposition() {
    // Wide datum with u(2) != 0 so that the jump is visible.
    double rec = 0.0, mismatch = 0.0;
    std::vector<double> gaps, spacings;
    for (std::size_t ny : {3001, 6001}) {
        const Grid g(30.0, ny);
        const ShearProfile p = canonical_profile(g);
        HeatSolver heat(g, p, 1e-3);
        for (int i = 0; i < 50; ++i) heat.advance();
        const ShearState& sh = heat.state();
        const CutoffSet cuts = build_cutoffs(g, 0.125, sh.a);
        const SolutionState s = single_mode_state(3, bump_shape(g, BumpSpec{1.5, 0.5, 0.05}));
        const Decomposition d = decompose_u(g, s, sh, cuts);
        const auto& m = d.modes[0];
        rec = std::max(rec, m.reconstruction_error);
        mismatch = std::max(mismatch, d.branch_mismatch);
        gaps.push_back(std::abs((m.du1_below - m.du1_above) - m.J) / std::max(std::abs(m.J), 1e-300));
        spacings.push_back(g.spacing());
    }
    // O(dy): the relative gap shrinks at least linearly under refinement.
    const bool jump_ok = gaps[1] <= gaps[0] * 0.6 + 1e-12 && gaps[0] <= 50.0 * spacings[0];
    return {rec <= 1e-6 && jump_ok,
            fmt::format("reconstruction {:.2e}, |jump - J|/|J| = {:.3e} -> {:.3e} (dy {:.4f} -> {:.4f})", rec, gaps[0],
                        gaps[1], spacings[0], spacings[1])};
}

SolutionState smooth_real_state(const Grid& g, int kmax) {
    return real_state(kmax, bump_shape(g, BumpSpec{1.2, 0.3, 0.05}), [](int k) { return 1.0 / (1.0 + k * k); });
}

// A short trajectory with three stored steps around t = 0.01.
Trajectory short_run(const Grid& g, int kmax) {
    const ShearProfile p = canonical_profile(g);
    HeatSolver heat(g, p, 1e-4);
    EvolveOptions o;
    o.stride = 1;
    Trajectory all = evolve(g, smooth_real_state(g, kmax), heat, 1e-4, 0.0102, o);
    Trajectory t;
    t.dt = all.dt;
    for (std::size_t i = all.states.size() - 3; i < all.states.size(); ++i) {
        t.states.push_back(all.states[i]);
        t.shears.push_back(all.shears[i]);
    }
    return t;
}

Outcome divergence_identity() {
    GevreyParams gp;
    std::vector<double> rel;
    for (std::size_t ny : {1024, 2047}) {
        const Grid g(30.0, ny);
        const Trajectory t = short_run(g, 8);
        const IdentityReport r = check_identities(g, t, 1, gp, 0.125);
        rel.push_back(r.divergence / r.divergence_scale);
    }
    const double ratio = rel[0] / rel[1];
    return {ratio >= 3.0, fmt::format("|Re sum int v conj(u_y)| / (||v|| ||u_y||) = {:.3e} -> {:.3e}, ratio {:.2f}",
                                      rel[0], rel[1], ratio)};
}

Outcome localized_identity() {
    GevreyParams gp;
    std::vector<double> res;
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t ny : {1024, 2047}) {
        const Grid g(30.0, ny);
        const Trajectory t = short_run(g, 8);
        const IdentityReport r = check_identities(g, t, 1, gp, 0.125);
        res.push_back(std::abs(r.localized_lhs - r.localized_rhs) / r.localized_scale);
        lhs = r.localized_lhs;
        rhs = r.localized_rhs;
    }
    const double order = std::log2(res[0] / res[1]);
    return {order >= 1.0, fmt::format("lhs {:.6e} rhs {:.6e}, relative residual {:.3e} -> {:.3e}, order {:.2f}", lhs,
                                      rhs, res[0], res[1], order)};
}

Outcome residual_orders() {
    // Space: a narrow datum at tiny dt, so the O(dy^2) error dominates.
    // Time: the finest grid, so the O(dt) error dominates.
    BumpSpec b{1.0, 0.08, 0.05};
    std::vector<std::string> names = {"u"};
    for (auto w : {Transformed::w1bar, Transformed::w2bar, Transformed::h, Transformed::h1}) names.push_back(to_string(w));
    std::vector<std::vector<double>> space(5), time(5);
    auto measure = [&](const Grid& g, const Trajectory& tr, double at, std::vector<std::vector<double>>& into) {
        into[0].push_back(residual_u(g, tr).at(at));
        int j = 1;
        for (auto w : {Transformed::w1bar, Transformed::w2bar, Transformed::h, Transformed::h1})
            into[j++].push_back(residual_transformed(w, g, tr, 0.125).at(at));
    };
    for (std::size_t ny : {4097, 8193, 16385}) {
        const Grid g(30.0, ny);
        HeatSolver heat(g, canonical_profile(g), 1e-8);
        const Trajectory tr = evolve(g, single_mode_state(4, bump_shape(g, b)), heat, 1e-8, 3e-8);
        measure(g, tr, 2e-8, space);
    }
    for (double dt : {2e-4, 1e-4, 5e-5}) {
        const Grid g(30.0, 16385);
        HeatSolver heat(g, canonical_profile(g), dt);
        const Trajectory tr = evolve(g, single_mode_state(4, bump_shape(g, b)), heat, dt, 8e-4);
        measure(g, tr, 4e-4, time);
    }
    bool ok = true;
    std::string detail;
    for (int j = 0; j < 5; ++j) {
        const double s1 = space[j][0] / space[j][1], s2 = space[j][1] / space[j][2];
        const double t1 = time[j][0] / time[j][1], t2 = time[j][1] / time[j][2];
        for (double r : {s1, s2}) ok = ok && r >= 3.4 && r <= 4.6;
        for (double r : {t1, t2}) ok = ok && r >= 1.7 && r <= 2.3;
        detail += fmt::format("{}: dy {:.2f} {:.2f} dt {:.2f} {:.2f}; ", names[j], s1, s2, t1, t2);
    }
    detail.resize(detail.size() - 2);
    return {ok, detail};
}

std::vector<EnergySample> gevrey_samples(const Grid& g, double dt, double T, const GevreyParams& gp, int kmax) {
    const ShearProfile p = canonical_profile(g);
    HeatSolver heat(g, p, dt);
    const SolutionState init = real_state(kmax, bump_shape(g, BumpSpec{}), [&](int k) {
        return std::exp(-gevrey_phi(gp, 0.0, k)) / (1.0 + k * k);
    });
    std::vector<EnergySample> samples;
    EvolveOptions o;
    o.keep_states = false;
    o.observer = [&](const SolutionState& s, const ShearState& sh) {
        samples.push_back(energy_sample(g, s, sh, build_cutoffs(g, 0.125, sh.a), gp));
    };
    evolve(g, init, heat, dt, T, o);
    return samples;
}

Outcome master_inequality() {
    // L = 15 keeps the cutoff transitions resolved at ny = 1024.
    const auto t0 = std::chrono::steady_clock::now();
    GevreyParams gp;
    gp.lambda = 1.0;
    gp.T = 0.25;
    const auto coarse = gevrey_samples(Grid(15.0, 1024), 1e-3, 0.25, gp, 16);
    const double secs = elapsed(t0);
    const auto fine = gevrey_samples(Grid(15.0, 2047), 5e-4, 0.25, gp, 16);
    const MasterReport mc = verify_master_inequality(coarse, gp), mf = verify_master_inequality(fine, gp);
    const double change = std::abs(mc.C_hat - mf.C_hat) / std::max(std::abs(mc.C_hat), std::abs(mf.C_hat));
    const bool ok = std::isfinite(mc.C_hat) && !mc.vacuous && change < 0.2 && mc.gronwall_holds && secs < 180.0;
    return {ok, fmt::format("C_hat {:.4g} -> {:.4g} (change {:.1f}%), max E/(E0 e^(C t)) = {:.6f}, coarse run {:.1f} s",
                            mc.C_hat, mf.C_hat, 100.0 * change, mc.gronwall_ratio, secs)};
}

Outcome instability_exponent() {
    const auto t0 = std::chrono::steady_clock::now();
    const Grid g(30.0, 4096);
    const CProfile shape = bump_shape(g, BumpSpec{});
    const std::vector<int> ks = {16, 32, 64, 128, 256};
    const int threads = std::max(1u, std::thread::hardware_concurrency());
    const auto runs = growth_sweep(g, canonical_profile(g), ks, shape, 1e-4, 0.5, 0.0, threads);
    const GrowthFit fit = fit_sqrt_law(runs);
    const auto control = growth_sweep(g, erf_profile(g), ks, shape, 1e-4, 0.5, 0.0, threads);
    const GrowthFit cf = fit_sqrt_law(control);
    const double secs = elapsed(t0);
    std::string sig;
    for (const auto& r : runs) sig += fmt::format("{:.3g} ", r.sigma);
    const bool ok = fit.slope >= 0.4 && fit.slope <= 0.6 && fit.r2 >= 0.9 && cf.stable && secs < 300.0;
    return {ok, fmt::format("sigma(16..256) = {}slope {:.3f} r2 {:.3f}, erf control {}, {:.1f} s", sig, fit.slope,
                            fit.r2, cf.stable ? "stable" : "unstable", secs)};
}

Outcome gevrey_damping() {
    const Grid g(30.0, 4096);
    const ShearProfile p = canonical_profile(g);
    const CProfile shape = bump_shape(g, BumpSpec{});
    const int k = 128;
    const double dt = 1e-4, T = 0.25;
    SolutionState init;
    CProfile half = shape;
    for (auto& x : half) x *= 0.5;
    init.modes = {{-k, half}, {k, half}};
    GevreyParams gp;
    gp.T = T;
    gp.lambda = calibrate_lambda(g, p, init, gp, 0.125, dt, T);
    const DampingReport d = damping_experiment(g, p, k, shape, gp, 0.125, dt, T);
    const bool ok = d.gevrey_ratio <= 1.05 && d.sobolev_ratio > 10.0;
    return {ok, fmt::format("calibrated lambda {:.4g}, horizon {:.4g}, Gevrey E ratio {:.4f}, k=128 Sobolev ratio {:.4g}",
                            d.lambda, d.horizon, d.gevrey_ratio, d.sobolev_ratio)};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism() {
    namespace fs = std::filesystem;
    const fs::path root = fs::temp_directory_path() / "prandtl_acceptance_determinism";
    fs::remove_all(root);
    fs::create_directories(root);
    const std::string base =
        "grid.L = 30\ngrid.ny = 512\ntime.dt = 1e-3\ntime.T = 0.05\nmodes.kmax = 8\ngevrey.lambda = 1\n"
        "output.snapshot_every = 25\ninstability.ks = 16,32,64,128,256\n";
    {
        std::ofstream(root / "run.cfg") << base;
    }
    int compared = 0;
    for (const char* sub : {"shear", "evolve", "verify", "instability"}) {
        for (int threads : {1, 3}) {
            const int code = run(sub, (root / "run.cfg").string(), (root / fmt::format("{}_{}", sub, threads)).string(), threads);
            if (code != 0) return {false, fmt::format("{} exited with {}", sub, code)};
        }
        for (const auto& e : fs::directory_iterator(root / fmt::format("{}_1", sub))) {
            if (e.path().extension() != ".csv") continue;
            const fs::path other = root / fmt::format("{}_3", sub) / e.path().filename();
            if (!fs::exists(other) || slurp(e.path()) != slurp(other))
                return {false, fmt::format("{} differs under --threads 3", e.path().filename().string())};
            ++compared;
        }
    }
    fs::remove_all(root);
    return {compared >= 5, fmt::format("{} CSV files byte-identical between --threads 1 and --threads 3", compared)};
}

}  // namespace

int main() {
    report(1, heat_oracle_agreement);
    report(2, erf_exactness);
    report(3, assumption_validation);
    report(4, kernel_identities);
    report(5, decomposition);
    report(6, divergence_identity);
    report(7, localized_identity);
    report(8, residual_orders);
    report(9, master_inequality);
    report(10, instability_exponent);
    report(11, gevrey_damping);
    report(12, determinism);
    fmt::print("{} of 12 criteria failed\n", failures);
    return failures;
}
