#include "prandtl/instability.hpp"

#include <fmt/format.h>
#include <fmt/os.h>

#include <algorithm>
#include <cmath>

#include "prandtl/error.hpp"
#include "prandtl/parallel.hpp"

namespace prandtl {

namespace {

struct LineFit {
    double slope = 0.0, intercept = 0.0, r2 = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    const double vx = n * sxx - sx * sx, vy = n * syy - sy * sy, cxy = n * sxy - sx * sy;
    LineFit f;
    if (!(vx > 0.0)) return f;
    f.slope = cxy / vx;
    f.intercept = (sy - f.slope * sx) / n;
    f.r2 = vy > 0.0 ? cxy * cxy / (vx * vy) : 1.0;
    return f;
}

double h14_energy(const Grid& g, const CProfile& u) {
    const double a = l2_norm(g, u), b = l2_norm(g, diff1(g, u));
    return a * a + b * b;
}

}  // namespace

ModeGrowth mode_growth(const Grid& g, const ShearProfile& profile, int k, const CProfile& shape, double dt, double T,
                       double epsilon) {
    ModeGrowth r;
    r.k = k;
    HeatSolver heat(g, profile, dt);
    EvolveOptions o;
    o.keep_states = false;
    o.observer = [&](const SolutionState& s, const ShearState&) {
        const double norm = l2_norm(g, s.modes[0].values);
        if (!(norm > 0.0)) throw NumericalAbort(fmt::format("mode k={} vanished at t={}", k, s.t));
        r.t.push_back(s.t);
        r.log_norm.push_back(std::log(norm));
    };
    evolve(g, single_mode_state(k, shape, epsilon), heat, dt, T, o);

    std::vector<double> x, y;
    for (std::size_t i = 0; i < r.t.size(); ++i)
        if (r.t[i] >= 0.5 * T - 1e-12) {
            x.push_back(r.t[i]);
            y.push_back(r.log_norm[i]);
        }
    if (x.size() < 3) throw ValidationError("growth fit window holds fewer than three samples");
    const LineFit f = least_squares(x, y);
    r.sigma = f.slope;
    r.r2_local = f.r2;
    // Tail check on ten sub-windows: each must move with the fitted trend.
    const std::size_t m = x.size() - 1;
    for (int q = 0; q < 10; ++q) {
        const std::size_t a = m * q / 10, b = m * (q + 1) / 10;
        if (b <= a) continue;
        if ((y[b] - y[a]) * r.sigma < 0.0) r.reliable = false;
    }
    return r;
}

std::vector<ModeGrowth> growth_sweep(const Grid& g, const ShearProfile& profile, const std::vector<int>& ks,
                                     const CProfile& shape, double dt, double T, double epsilon, int threads) {
    std::vector<ModeGrowth> out(ks.size());
    parallel_for(ks.size(), threads,
                 [&](std::size_t j) { out[j] = mode_growth(g, profile, ks[j], shape, dt, T, epsilon); });
    return out;
}

GrowthFit fit_sqrt_law(const std::vector<int>& ks, const std::vector<double>& sigmas) {
    if (ks.size() != sigmas.size()) throw ValidationError("fit_sqrt_law: size mismatch");
    if (ks.size() < 5) throw ValidationError("fit_sqrt_law needs at least five wavenumbers");
    for (std::size_t i = 1; i < ks.size(); ++i)
        if (!(ks[i] > ks[i - 1])) throw ValidationError("fit_sqrt_law: wavenumbers must increase");
    GrowthFit fit;
    fit.ks = ks;
    fit.sigmas = sigmas;
    std::vector<double> x, y;
    for (std::size_t i = 0; i < ks.size(); ++i)
        if (sigmas[i] > 0.0) {
            x.push_back(std::log(static_cast<double>(ks[i])));
            y.push_back(std::log(sigmas[i]));
        }
    if (x.size() < 2) {
        fit.stable = true;
        return fit;
    }
    const LineFit f = least_squares(x, y);
    fit.slope = f.slope;
    fit.intercept = f.intercept;
    fit.r2 = f.r2;
    fit.reproduced = f.r2 >= 0.9;
    return fit;
}

GrowthFit fit_sqrt_law(const std::vector<ModeGrowth>& runs) {
    std::vector<int> ks;
    std::vector<double> s;
    for (const auto& r : runs) {
        ks.push_back(r.k);
        s.push_back(r.sigma);
    }
    return fit_sqrt_law(ks, s);
}

double admissible_horizon(double T, double lambda, double dt) {
    double steps = std::floor(T / dt + 1e-9);
    if (lambda > 0.0) {
        const double cap = 0.5 / lambda;
        while (steps > 0 && !(steps * dt < cap)) steps -= 1.0;
    }
    return steps * dt;
}

DampingReport damping_experiment(const Grid& g, const ShearProfile& profile, int k, const CProfile& shape,
                                 const GevreyParams& p, double delta, double dt, double T, int threads) {
    DampingReport r;
    r.k = k;
    r.lambda = p.lambda;
    r.horizon = admissible_horizon(T, p.lambda, dt);

    SolutionState init;
    CProfile half = shape;
    for (auto& x : half) x *= 0.5;
    init.modes = {{-k, half}, {k, half}};

    {
        HeatSolver heat(g, profile, dt);
        double e0 = 0.0;
        EvolveOptions o;
        o.keep_states = false;
        o.threads = threads;
        o.observer = [&](const SolutionState& s, const ShearState&) {
            const double e = h14_energy(g, s.find(k)->values);
            if (s.t == 0.0) e0 = e;
            r.sobolev_ratio = std::max(r.sobolev_ratio, e / e0);
        };
        evolve(g, init, heat, dt, r.horizon, o);
    }
    {
        HeatSolver heat(g, profile, dt);
        GevreyParams q = p;
        q.T = r.horizon;
        double e0 = 0.0;
        EvolveOptions o;
        o.keep_states = false;
        o.threads = threads;
        o.observer = [&](const SolutionState& s, const ShearState& sh) {
            const double e = energy_sample(g, s, sh, build_cutoffs(g, delta, sh.a), q, threads).E;
            if (s.t == 0.0) e0 = e;
            if (e0 > kEnergyFloor) r.gevrey_ratio = std::max(r.gevrey_ratio, e / e0);
        };
        evolve(g, init, heat, dt, r.horizon, o);
    }
    return r;
}

double calibrate_lambda(const Grid& g, const ShearProfile& profile, const SolutionState& init, GevreyParams p,
                        double delta, double dt, double T, int threads, double floor) {
    p.lambda = floor;
    // At least ten steps so the fit has enough samples.
    const double pre = admissible_horizon(std::max(0.25 * T, std::min(T, 10.0 * dt)), p.lambda, dt);
    p.T = pre;
    HeatSolver heat(g, profile, dt);
    std::vector<EnergySample> samples;
    EvolveOptions o;
    o.keep_states = false;
    o.threads = threads;
    o.observer = [&](const SolutionState& s, const ShearState& sh) {
        samples.push_back(energy_sample(g, s, sh, build_cutoffs(g, delta, sh.a), p, threads));
    };
    evolve(g, init, heat, dt, pre, o);
    const MasterReport m = verify_master_inequality(samples, p);
    return std::max(floor, 2.0 * m.C_hat);
}

void write_growth_csv(const std::string& path, const std::vector<ModeGrowth>& runs) {
    auto out = fmt::output_file(path);
    out.print("k,sigma,r2_local\n");
    for (const auto& r : runs) out.print("{},{:.17g},{:.17g}\n", r.k, r.sigma, r.r2_local);
}

void write_growth_fit(const std::string& path, const GrowthFit& fit) {
    auto out = fmt::output_file(path);
    if (fit.stable) {
        out.print("status stable\n");
        return;
    }
    out.print("slope {:.17g}\nintercept {:.17g}\nr2 {:.17g}\n", fit.slope, fit.intercept, fit.r2);
    out.print("status {}\n", fit.reproduced ? "fit" : "unreliable");
}

}  // namespace prandtl
