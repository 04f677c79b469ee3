#include <fmt/format.h>
#include <fmt/os.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>

#include "prandtl/config.hpp"
#include "prandtl/error.hpp"
#include "prandtl/gevrey.hpp"
#include "prandtl/instability.hpp"

namespace prandtl {

namespace {

namespace fs = std::filesystem;

struct Setup {
    RunConfig cfg;
    Grid grid;
    ShearProfile profile;
    int threads = 1;
    fs::path out;
};

ShearProfile make_profile(const RunConfig& c, const Grid& g) {
    if (c.profile_kind == "erf") return erf_profile(g, c.profile_t0, c.delta);
    if (c.profile_kind == "file") return import_profile_csv(g, c.profile_path, ShearParams{0.125, c.delta});
    return canonical_profile(g, c.delta);
}

CProfile bump(const Setup& s) {
    return bump_shape(s.grid, BumpSpec{s.cfg.init_center, s.cfg.init_width, s.cfg.init_wall_width});
}

GevreyParams gevrey_params(const RunConfig& c, double lambda, double T) {
    GevreyParams p;
    p.theta = c.theta;
    p.theta1 = c.theta1;
    p.lambda = lambda;
    p.T = T;
    p.check_theta1 = c.check_theta1;
    return p;
}

SolutionState initial_state(const Setup& s) {
    const RunConfig& c = s.cfg;
    if (c.init_kind == "file") {
        std::vector<double> ys;
        SolutionState st = read_snapshot(c.init_path, &ys);
        if (ys.size() != s.grid.size()) throw ValidationError("init snapshot does not match grid.ny");
        for (std::size_t i = 0; i < ys.size(); ++i)
            if (std::abs(ys[i] - s.grid.y(i)) > 1e-9 * c.L) throw ValidationError("init snapshot nodes differ from the grid");
        st.t = 0.0;
        st.epsilon = c.epsilon;
        return st;
    }
    const GevreyParams p = gevrey_params(c, 1.0, c.T);
    return real_state(
        c.kmax, bump(s),
        [&](int k) {
            double a = c.init_amplitude / (1.0 + static_cast<double>(k) * k);
            if (c.init_decay == "gevrey") a *= std::exp(-gevrey_phi(p, 0.0, k));
            return a;
        },
        c.epsilon);
}

// min(T, T1, T2) from a shear pre-run at the configured dt.
double shear_horizon(const Setup& s, double T) {
    const double span = std::min(T, 1.0);
    const auto states = heat_solve(s.grid, s.profile, s.cfg.dt, admissible_horizon(span, 0.0, s.cfg.dt));
    const ShearParams sp{0.125, s.cfg.delta};
    const PersistenceResult pr = persistence_window(s.grid, states, sp);
    if (!pr.holds_at_start) throw ValidationError("the shear fails the convexity and monotonicity clauses at t = 0");
    const CriticalPointTrack track = track_critical_point(s.grid, states, sp);
    return std::min({T, pr.T1, track.T2});
}

struct Run {
    double lambda = 0.0, horizon = 0.0;
    std::vector<EnergySample> samples;
    Trajectory middle;  // three consecutive stored states around the midpoint
};

Run gevrey_run(const Setup& s, const std::function<void(const SolutionState&, std::size_t)>& on_state = {}) {
    const RunConfig& c = s.cfg;
    const SolutionState init = initial_state(s);
    const double limit = shear_horizon(s, c.T);
    Run r;
    r.lambda = c.lambda ? *c.lambda
                        : calibrate_lambda(s.grid, s.profile, init, gevrey_params(c, 1.0, limit), c.delta, c.dt, limit,
                                           s.threads);
    r.horizon = admissible_horizon(limit, r.lambda, c.dt);
    const auto steps = static_cast<std::size_t>(std::llround(r.horizon / c.dt));
    if (steps < 10)
        throw ValidationError(fmt::format("lambda = {:.6g} leaves a horizon of {} steps of dt = {}, fewer than ten",
                                          r.lambda, steps, c.dt));
    const GevreyParams p = gevrey_params(c, r.lambda, r.horizon);
    validate(p, c.kmax);
    const std::size_t mid = steps / 2;

    HeatSolver heat(s.grid, s.profile, c.dt);
    EvolveOptions o;
    o.keep_states = false;
    o.threads = s.threads;
    std::size_t n = 0;
    r.middle.dt = c.dt;
    o.observer = [&](const SolutionState& st, const ShearState& sh) {
        r.samples.push_back(energy_sample(s.grid, st, sh, build_cutoffs(s.grid, c.delta, sh.a), p, s.threads));
        if (n + 1 >= mid && n <= mid + 1) {
            r.middle.states.push_back(st);
            r.middle.shears.push_back(sh);
        }
        if (on_state) on_state(st, n);
        ++n;
    };
    evolve(s.grid, init, heat, c.dt, r.horizon, o);
    return r;
}

double relative_change(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

int cmd_shear(const Setup& s) {
    const RunConfig& c = s.cfg;
    const ShearParams sp{0.125, c.delta};
    const AssumptionReport rep = validate_assumptions(s.grid, s.profile);
    const double T = admissible_horizon(std::min(c.T, 1.0), 0.0, c.dt);
    const auto states = heat_solve(s.grid, s.profile, c.dt, T);
    const ShearEnergy energy = shear_energy(s.grid, states);
    write_shear_trace((s.out / "shear_trace.csv").string(), s.grid, states, energy, sp);

    const PersistenceResult pr = persistence_window(s.grid, states, sp);
    auto out = fmt::output_file((s.out / "validation_report.txt").string());
    for (const auto& cl : rep.clauses) out.print("clause {} {} margin {:.6g}\n", cl.name, cl.pass ? "pass" : "fail", cl.margin);
    out.print("min_convexity {:.17g}\n", rep.min_convexity);
    out.print("min_monotone_ratio {:.17g}\n", rep.min_monotone_ratio);
    out.print("T1 {:.17g}\n", pr.T1);
    if (s.profile.kind != "erf") {
        const CriticalPointTrack track = track_critical_point(s.grid, states, sp);
        out.print("T2 {:.17g}\n", track.T2);
        out.print("a_max_residual {:.3e}\n", track.max_residual);
        out.print("a_max_disagreement {:.3e}\n", track.max_disagreement);
    }
    const DecayReport decay = check_decay(s.grid, states);
    out.print("decay_sigma {:.6g}\n", decay.sigma);
    out.print("shear_energy_rate {:.17g}\n", energy.C);
    out.close();
    if (!rep.all_pass()) {
        std::cerr << "shear profile fails the structural assumptions\n";
        return 2;
    }
    return 0;
}

int cmd_evolve(const Setup& s) {
    const int every = s.cfg.snapshot_every;
    std::size_t last_n = 0;
    SolutionState last;
    const Run r = gevrey_run(s, [&](const SolutionState& st, std::size_t n) {
        if (every > 0 && n % static_cast<std::size_t>(every) == 0)
            write_snapshot((s.out / snapshot_filename(st.t)).string(), s.grid, st);
        last = st;
        last_n = n;
    });
    if (every == 0 || last_n % static_cast<std::size_t>(every) != 0)
        write_snapshot((s.out / snapshot_filename(last.t)).string(), s.grid, last);
    const MasterReport m = verify_master_inequality(r.samples, gevrey_params(s.cfg, r.lambda, r.horizon));
    write_energy_trace((s.out / "energy_trace.csv").string(), r.samples, m);
    return 0;
}

int cmd_verify(const Setup& s) {
    const RunConfig& c = s.cfg;
    const Run coarse = gevrey_run(s);
    // Refinement pair: dt/2 and half the spacing, with lambda held fixed.
    Setup fine_setup{c, Grid(c.L, 2 * static_cast<std::size_t>(c.ny) - 1), {}, s.threads, s.out};
    fine_setup.cfg.dt = c.dt / 2;
    fine_setup.cfg.ny = 2 * c.ny - 1;
    fine_setup.cfg.lambda = coarse.lambda;
    fine_setup.profile = make_profile(fine_setup.cfg, fine_setup.grid);
    const Run fine = gevrey_run(fine_setup);

    const GevreyParams pc = gevrey_params(c, coarse.lambda, coarse.horizon);
    const GevreyParams pf = gevrey_params(c, fine.lambda, fine.horizon);
    const MasterReport mc = verify_master_inequality(coarse.samples, pc);
    const MasterReport mf = verify_master_inequality(fine.samples, pf);
    write_energy_trace((s.out / "energy_trace.csv").string(), coarse.samples, mc);

    auto out = fmt::output_file((s.out / "constants.txt").string());
    out.print("lambda {:.17g}\nhorizon {:.17g}\n", coarse.lambda, coarse.horizon);
    if (mc.vacuous) {
        out.print("master vacuous\n");
    } else {
        out.print("master C_hat {:.17g} refined {:.17g} change {:.6g}\n", mc.C_hat, mf.C_hat,
                  relative_change(mc.C_hat, mf.C_hat));
        out.print("gronwall ratio {:.17g} integrated {:.17g} {}\n", mc.gronwall_ratio, mc.integrated_ratio,
                  mc.gronwall_holds ? "holds" : "violated");
    }
    const auto ic = verify_component_inequalities(coarse.samples, pc, c.verify_h1);
    const auto iff = verify_component_inequalities(fine.samples, pf, c.verify_h1);
    for (std::size_t i = 0; i < ic.size(); ++i) {
        if (ic[i].vacuous) {
            out.print("inequality {} vacuous{}\n", ic[i].name, ic[i].degenerate ? " degenerate" : "");
            continue;
        }
        out.print("inequality {} C {:.17g} refined {:.17g} change {:.6g}{}\n", ic[i].name, ic[i].C, iff[i].C,
                  relative_change(ic[i].C, iff[i].C), ic[i].degenerate ? " degenerate" : "");
    }
    const IdentityReport a = check_identities(s.grid, coarse.middle, 1, pc, c.delta);
    const IdentityReport b = check_identities(fine_setup.grid, fine.middle, 1, pf, c.delta);
    auto order = [](double x, double y) { return x > 0.0 && y > 0.0 ? std::log2(x / y) : NAN; };
    out.print("identity divergence {:.6e} refined {:.6e} order {:.3f}\n", a.divergence, b.divergence,
              order(a.divergence, b.divergence));
    const double la = std::abs(a.localized_lhs - a.localized_rhs), lb = std::abs(b.localized_lhs - b.localized_rhs);
    out.print("identity localized lhs {:.17g} rhs {:.17g} residual {:.6e} refined {:.6e} order {:.3f}\n",
              a.localized_lhs, a.localized_rhs, la, lb, order(la, lb));
    out.print("identity weight residual {:.6e} refined {:.6e} order {:.3f}\n", a.weight_residual, b.weight_residual,
              order(a.weight_residual, b.weight_residual));
    const RecoveryFit rc = check_recovery(coarse.samples, pc), rf = check_recovery(fine.samples, pf);
    if (rc.vacuous) out.print("recovery vacuous{}\n", rc.degenerate ? " degenerate" : "");
    else out.print("recovery C {:.17g} refined {:.17g} change {:.6g}\n", rc.C, rf.C, relative_change(rc.C, rf.C));
    return 0;
}

int cmd_instability(const Setup& s) {
    const RunConfig& c = s.cfg;
    const CProfile shape = bump(s);
    // The monotone control has no window to respect.
    const double T = admissible_horizon(s.profile.kind == "erf" ? c.T : shear_horizon(s, c.T), 0.0, c.dt);
    const auto runs = growth_sweep(s.grid, s.profile, c.instability_ks, shape, c.dt, T, c.epsilon, s.threads);
    write_growth_csv((s.out / "growth.csv").string(), runs);
    const GrowthFit fit = fit_sqrt_law(runs);
    write_growth_fit((s.out / "growth_fit.txt").string(), fit);
    if (s.profile.kind == "erf") return 0;

    // Damping comparison on the cos(kx) datum at the probe wavenumber.
    SolutionState init;
    CProfile half = shape;
    for (auto& x : half) x *= 0.5;
    init.modes = {{-c.probe_k, half}, {c.probe_k, half}};
    const double lambda = c.lambda ? *c.lambda
                                   : calibrate_lambda(s.grid, s.profile, init, gevrey_params(c, 1.0, T), c.delta,
                                                      c.dt, T, s.threads);
    const DampingReport d = damping_experiment(s.grid, s.profile, c.probe_k, shape, gevrey_params(c, lambda, T),
                                               c.delta, c.dt, T, s.threads);
    auto out = fmt::output_file((s.out / "damping.txt").string());
    out.print("k {}\nlambda {:.17g}\nhorizon {:.17g}\ngevrey_ratio {:.17g}\nsobolev_ratio {:.17g}\n", d.k, d.lambda,
              d.horizon, d.gevrey_ratio, d.sobolev_ratio);
    return 0;
}

}  // namespace

int run(const std::string& subcommand, const std::string& config_path, const std::optional<std::string>& out_dir,
        int threads) {
    RunConfig cfg;
    try {
        cfg = load_config(config_path);
    } catch (const ValidationError& e) {
        std::cerr << "config: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    try {
        if (out_dir) cfg.output_dir = *out_dir;
        if (threads < 1) throw ValidationError("--threads must be at least 1");
        Grid grid(cfg.L, static_cast<std::size_t>(cfg.ny));
        Setup s{cfg, grid, make_profile(cfg, grid), threads, fs::path(cfg.output_dir)};
        fs::create_directories(s.out);
        if (subcommand == "shear") return cmd_shear(s);
        if (subcommand == "evolve") return cmd_evolve(s);
        if (subcommand == "verify") return cmd_verify(s);
        if (subcommand == "instability") return cmd_instability(s);
        throw ValidationError("unknown subcommand " + subcommand);
    } catch (const ValidationError& e) {
        std::cerr << "validation: " << e.what() << "\n";
        return 2;
    } catch (const NumericalAbort& e) {
        std::cerr << "numerical abort: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace prandtl
