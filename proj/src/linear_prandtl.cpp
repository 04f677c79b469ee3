#include "prandtl/linear_prandtl.hpp"

#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <sstream>

#include "prandtl/error.hpp"
#include "prandtl/parallel.hpp"

namespace prandtl {

namespace {

constexpr Complex I{0.0, 1.0};

CProfile step_mode(const Grid& g, const ModeField& m, const ShearState& shear, double dt, double epsilon) {
    const std::size_t n = g.size();
    const double k = m.k;
    const double r = dt / (g.spacing() * g.spacing());
    const CProfile v = compute_v(g, m);
    const std::size_t inner = n - 2;
    std::vector<Complex> sub(inner, -r), diag(inner), sup(inner, -r), rhs(inner);
    const double damping = 1.0 + 2.0 * r + dt * epsilon * epsilon * k * k;
    // March in the frame moving with us(a) and rotate back exactly. The implicit
    // transport then only damps the slow relative phase near the critical layer.
    const double c = shear.has_critical_point() ? interpolate(g, shear.us, shear.a).value : 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        diag[i - 1] = Complex(damping, dt * k * (shear.us[i] - c));
        rhs[i - 1] = m.values[i] - dt * v[i] * shear.dus[i];
    }
    solve_tridiagonal<Complex>(sub, diag, sup, rhs);
    CProfile out(n, Complex{});
    const Complex rotate = std::exp(-I * (k * c * dt));
    for (std::size_t i = 0; i < inner; ++i) {
        if (!std::isfinite(rhs[i].real()) || !std::isfinite(rhs[i].imag()))
            throw NumericalAbort(fmt::format("non-finite value in mode k={} at t={}", m.k, shear.t + dt));
        out[i + 1] = rotate * rhs[i];
    }
    return out;
}

}  // namespace

const ModeField* SolutionState::find(int k) const {
    for (const auto& m : modes)
        if (m.k == k) return &m;
    return nullptr;
}

CProfile compute_v(const Grid& g, const ModeField& m) {
    CProfile v = cumulative_integral<Complex>(g, m.values);
    const Complex factor = -I * static_cast<double>(m.k);
    for (auto& x : v) x *= factor;
    return v;
}

SolutionState step(const Grid& g, const SolutionState& state, const ShearState& shear, double dt, int threads,
                   bool* cfl_warning) {
    if (!(dt > 0.0)) throw ValidationError("step: dt must be positive");
    SolutionState next;
    next.t = state.t + dt;
    next.epsilon = state.epsilon;
    next.modes.resize(state.modes.size());
    double umax = 0.0;
    for (double u : shear.us) umax = std::max(umax, std::abs(u));
    parallel_for(state.modes.size(), threads, [&](std::size_t j) {
        const ModeField& m = state.modes[j];
        if (m.values.size() != g.size()) throw ValidationError("mode profile does not match the grid");
        next.modes[j].k = m.k;
        next.modes[j].values = step_mode(g, m, shear, dt, state.epsilon);
    });
    if (cfl_warning)
        for (const auto& m : state.modes)
            if (std::abs(m.k) * umax * dt > 1.0) *cfl_warning = true;
    return next;
}

Trajectory evolve(const Grid& g, const SolutionState& init, HeatSolver& shear, double dt, double T,
                  const EvolveOptions& opts) {
    if (!(T >= 0.0)) throw ValidationError("evolve: horizon must be nonnegative");
    if (opts.horizon_limit > 0.0 && T > opts.horizon_limit * (1.0 + 1e-12))
        throw ValidationError(fmt::format("evolve: T={} exceeds the validity window {}", T, opts.horizon_limit));
    if (std::abs(shear.dt() - dt) > 1e-15 * dt) throw ValidationError("evolve: shear and solution dt differ");
    if (std::abs(shear.state().t - init.t) > 1e-12) throw ValidationError("evolve: shear time does not match data");
    const auto steps = static_cast<std::size_t>(std::llround(T / dt));
    if (std::abs(static_cast<double>(steps) * dt - T) > 1e-9 * std::max(1.0, T))
        throw ValidationError("evolve: horizon must be a multiple of dt");
    const std::size_t stride = std::max<std::size_t>(1, opts.stride);

    Trajectory traj;
    traj.dt = dt;
    SolutionState cur = init;
    auto record = [&](std::size_t n) {
        if (opts.observer) opts.observer(cur, shear.state());
        if (opts.keep_states && (n % stride == 0 || n == steps)) {
            traj.states.push_back(cur);
            traj.shears.push_back(shear.state());
        }
    };
    record(0);
    for (std::size_t n = 1; n <= steps; ++n) {
        cur = step(g, cur, shear.state(), dt, opts.threads, &traj.cfl_warning);
        shear.advance();
        cur.t = init.t + static_cast<double>(n) * dt;
        record(n);
    }
    return traj;
}

double ResidualReport::at(double t) const {
    std::size_t best = 0;
    for (std::size_t n = 0; n < times.size(); ++n)
        if (std::abs(times[n] - t) < std::abs(times[best] - t)) best = n;
    double s = 0.0;
    for (double x : norms.at(best)) s += x * x;
    return std::sqrt(s);
}

ResidualReport residual_u(const Grid& g, const Trajectory& traj) {
    if (traj.states.size() < 3) throw ValidationError("residual needs at least three stored steps");
    ResidualReport r;
    const std::size_t n = g.size(), lo = kResidualMargin, hi = n - kResidualMargin;
    for (std::size_t s = 1; s + 1 < traj.states.size(); ++s) {
        const auto& prev = traj.states[s - 1];
        const auto& cur = traj.states[s];
        const auto& next = traj.states[s + 1];
        const auto& sh = traj.shears[s];
        const double two_dt = next.t - prev.t;
        std::vector<double> per_mode;
        for (std::size_t j = 0; j < cur.modes.size(); ++j) {
            const ModeField& m = cur.modes[j];
            const double k = m.k;
            CProfile v = hi::cumulative_integral<Complex>(g, m.values);
            const CProfile uyy = hi::diff2<Complex>(g, m.values);
            CProfile res(n, Complex{});
            for (std::size_t i = lo; i < hi; ++i) {
                const Complex ut = (next.modes[j].values[i] - prev.modes[j].values[i]) / two_dt;
                const Complex vi = -I * k * v[i];
                res[i] = ut + I * k * sh.us[i] * m.values[i] + vi * sh.dus[i] - uyy[i] +
                         cur.epsilon * cur.epsilon * k * k * m.values[i];
            }
            const double norm = l2_norm(g, res);
            per_mode.push_back(norm);
            r.max = std::max(r.max, norm);
        }
        r.times.push_back(cur.t);
        r.norms.push_back(std::move(per_mode));
    }
    return r;
}

CProfile bump_shape(const Grid& g, const BumpSpec& b) {
    CProfile out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double y = g.y(i);
        const double z = (y - b.center) / b.width;
        out[i] = std::exp(-z * z) * (1.0 - std::exp(-(y / b.wall_width) * (y / b.wall_width)));
    }
    out.front() = 0.0;
    out.back() = 0.0;
    return out;
}

SolutionState single_mode_state(int k, CProfile shape, double epsilon) {
    SolutionState s;
    s.epsilon = epsilon;
    s.modes.push_back({k, std::move(shape)});
    return s;
}

SolutionState real_state(int kmax, const CProfile& shape, const std::function<double(int)>& amplitude,
                         double epsilon) {
    SolutionState s;
    s.epsilon = epsilon;
    for (int k = -kmax; k <= kmax; ++k) {
        const double c = k == 0 ? amplitude(0) : 0.5 * amplitude(std::abs(k));
        CProfile v(shape.size());
        for (std::size_t i = 0; i < shape.size(); ++i) v[i] = c * shape[i];
        s.modes.push_back({k, std::move(v)});
    }
    return s;
}

std::string snapshot_filename(double t) { return fmt::format("snapshot_t{}.csv", t); }

void write_snapshot(const std::string& path, const Grid& g, const SolutionState& s) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path);
    out << "y";
    for (const auto& m : s.modes) out << fmt::format(",re_k{},im_k{}", m.k, m.k);
    out << '\n';
    for (std::size_t i = 0; i < g.size(); ++i) {
        out << fmt::format("{:.17g}", g.y(i));
        for (const auto& m : s.modes) out << fmt::format(",{:.17g},{:.17g}", m.values[i].real(), m.values[i].imag());
        out << '\n';
    }
}

SolutionState read_snapshot(const std::string& path, std::vector<double>* ys) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open snapshot " + path);
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("empty snapshot " + path);
    SolutionState s;
    {
        std::istringstream hs(line);
        std::string col;
        std::getline(hs, col, ',');
        if (col != "y") throw ValidationError("snapshot header must start with y");
        while (std::getline(hs, col, ',')) {
            if (col.rfind("re_k", 0) != 0) throw ValidationError("unexpected snapshot column " + col);
            s.modes.push_back({std::stoi(col.substr(4)), {}});
            if (!std::getline(hs, col, ',') || col.rfind("im_k", 0) != 0)
                throw ValidationError("snapshot columns must come in re/im pairs");
        }
    }
    if (ys) ys->clear();
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const char* p = line.c_str();
        char* end = nullptr;
        const double y = std::strtod(p, &end);
        if (ys) ys->push_back(y);
        for (auto& m : s.modes) {
            if (*end != ',') throw ValidationError("short snapshot row");
            const double re = std::strtod(end + 1, &end);
            if (*end != ',') throw ValidationError("short snapshot row");
            const double im = std::strtod(end + 1, &end);
            m.values.emplace_back(re, im);
        }
    }
    return s;
}

}  // namespace prandtl
