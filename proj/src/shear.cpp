#include "prandtl/shear.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <numbers>
#include <sstream>

#include "prandtl/error.hpp"

namespace prandtl {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const Profile& profile_order(const ShearProfile& p, int order) {
    switch (order) {
        case 0: return p.u0;
        case 1: return p.du0;
        case 2: return p.d2u0;
        default: return p.d3u0;
    }
}

// The closed forms for derivative orders 0..4.
double canonical_exact(double y, int order) {
    const double e = std::exp(-y);
    switch (order) {
        case 0: return 1.0 - e * (y * y + 1.5 * y + 1.0);
        case 1: return e * (y - 1.0) * (y + 0.5);
        case 2: return e * y * (2.5 - y);
        case 3: return e * (y * y - 4.5 * y + 2.5);
        case 4: return e * (-y * y + 6.5 * y - 7.0);
        default: throw std::invalid_argument("canonical profile: derivative order above 4");
    }
}

ShearProfile from_exact(const Grid& g, std::string kind, std::function<double(double, int)> exact,
                        ShearParams params) {
    ShearProfile p;
    p.kind = std::move(kind);
    p.params = params;
    p.u0 = sample(g, [&](double y) { return exact(y, 0); });
    p.du0 = sample(g, [&](double y) { return exact(y, 1); });
    p.d2u0 = sample(g, [&](double y) { return exact(y, 2); });
    p.d3u0 = sample(g, [&](double y) { return exact(y, 3); });
    p.exact = std::move(exact);
    return p;
}

// Every node inside [lo, hi].
template <class F>
void for_nodes_in(const Grid& g, double lo, double hi, F&& f) {
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.y(i) >= lo - 1e-12 && g.y(i) <= hi + 1e-12) f(i);
}

bool in_monotone_region(double y, double delta) { return y <= 1.0 - delta + 1e-12 || y >= 1.0 + delta - 1e-12; }

}  // namespace

double ShearProfile::eval(const Grid& g, double y, int order) const {
    if (exact) return exact(y, order);
    if (y >= g.length()) return order == 0 ? u0.back() : 0.0;
    if (order == 4) return interpolate(g, d3u0, y).slope;
    return interpolate(g, profile_order(*this, order), y).value;
}

ShearProfile canonical_profile(const Grid& g, double delta) {
    return from_exact(g, "canonical", canonical_exact, ShearParams{0.125, delta});
}

ShearProfile erf_profile(const Grid& g, double t0, double delta) {
    const double s = 2.0 * std::sqrt(t0);
    auto exact = [s, t0](double y, int order) {
        if (order == 0) return std::erf(y / s);
        const double g1 = std::exp(-y * y / (4.0 * t0)) / std::sqrt(std::numbers::pi * t0);
        switch (order) {
            case 1: return g1;
            case 2: return -g1 * y / (2.0 * t0);
            case 3: return g1 * (y * y / (4.0 * t0 * t0) - 1.0 / (2.0 * t0));
            case 4: return g1 * (3.0 * y / (4.0 * t0 * t0) - y * y * y / (8.0 * t0 * t0 * t0));
            default: throw std::invalid_argument("erf profile: derivative order above 4");
        }
    };
    return from_exact(g, "erf", exact, ShearParams{0.125, delta});
}

ShearProfile profile_from_samples(const Grid& g, Profile u0, ShearParams params, std::string kind) {
    if (u0.size() != g.size()) throw ValidationError("profile samples do not match the grid");
    ShearProfile p;
    p.kind = std::move(kind);
    p.params = params;
    p.u0 = std::move(u0);
    p.du0 = diff1(g, p.u0);
    p.d2u0 = diff1(g, p.du0);
    p.d3u0 = diff1(g, p.d2u0);
    return p;
}

ShearProfile import_profile_csv(const Grid& g, const std::string& path, ShearParams params) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open profile file " + path);
    std::vector<double> ys, us;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (header) {
            header = false;
            if (line.find_first_not_of(" \t") != std::string::npos &&
                !std::isdigit(static_cast<unsigned char>(line[line.find_first_not_of(" \t")])) &&
                line[line.find_first_not_of(" \t")] != '-' && line[line.find_first_not_of(" \t")] != '.')
                continue;
        }
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double y, u;
        if (!(ls >> y >> u)) throw ValidationError("malformed profile row: " + line);
        if (!ys.empty() && y <= ys.back()) throw ValidationError("profile y values must increase");
        ys.push_back(y);
        us.push_back(u);
    }
    if (ys.size() < 2) throw ValidationError("profile file needs at least two rows");
    Profile u0(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double y = g.y(i);
        if (y <= ys.front()) { u0[i] = us.front(); continue; }
        if (y >= ys.back()) { u0[i] = us.back(); continue; }
        const auto it = std::upper_bound(ys.begin(), ys.end(), y);
        const std::size_t j = static_cast<std::size_t>(it - ys.begin());
        const double s = (y - ys[j - 1]) / (ys[j] - ys[j - 1]);
        u0[i] = (1.0 - s) * us[j - 1] + s * us[j];
    }
    return profile_from_samples(g, std::move(u0), params, "file");
}

bool AssumptionReport::all_pass() const {
    return std::all_of(clauses.begin(), clauses.end(), [](const Clause& c) { return c.pass; });
}

const Clause& AssumptionReport::clause(const std::string& name) const {
    for (const auto& c : clauses)
        if (c.name == name) return c;
    throw std::out_of_range("no clause named " + name);
}

double min_convexity(const Grid& g, const Profile& d2us) {
    double m = std::numeric_limits<double>::infinity();
    for_nodes_in(g, 0.5, 2.0, [&](std::size_t i) { m = std::min(m, d2us[i]); });
    return m;
}

double monotone_ratio(const Grid& g, const Profile& dus, const ShearParams& p) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.size(); ++i)
        if (in_monotone_region(g.y(i), p.delta))
            m = std::min(m, std::abs(dus[i]) * std::exp(g.y(i)) / (p.c * p.delta));
    return m;
}

AssumptionReport validate_assumptions(const Grid& g, const ShearProfile& p) {
    AssumptionReport r;
    const double c = p.params.c, delta = p.params.delta;

    const double u_wall = p.eval(g, 0.0, 0);
    r.clauses.push_back({"boundary_value", std::abs(u_wall) <= 1e-12, -std::abs(u_wall)});

    const double scale2 = std::max(1.0, *std::max_element(p.d2u0.begin(), p.d2u0.end()));
    const double d2_wall = p.eval(g, 0.0, 2);
    r.clauses.push_back({"wall_curvature", std::abs(d2_wall) <= 1e-8 * scale2, -std::abs(d2_wall)});

    double du_max = 0.0;
    for (double v : p.du0) du_max = std::max(du_max, std::abs(v));
    const double du_one = p.eval(g, 1.0, 1);
    const bool sign_change = p.eval(g, 1.0 - delta, 1) * p.eval(g, 1.0 + delta, 1) < 0.0;
    r.clauses.push_back({"critical_point", std::abs(du_one) <= 1e-8 * du_max && sign_change,
                         sign_change ? -std::abs(du_one) : -du_max});

    // Convexity on [1/2, 2], sampled at the nodes and both endpoints.
    double conv = std::min(p.eval(g, 0.5, 2), p.eval(g, 2.0, 2));
    conv = std::min(conv, min_convexity(g, p.d2u0));
    r.min_convexity = conv;
    r.clauses.push_back({"convexity", conv >= c, conv - c});

    double mono = monotone_ratio(g, p.du0, p.params);
    for (double y : {1.0 - delta, 1.0 + delta})
        mono = std::min(mono, std::abs(p.eval(g, y, 1)) * std::exp(y) / (c * delta));
    r.min_monotone_ratio = mono;
    r.clauses.push_back({"monotonicity", mono >= 1.0, mono - 1.0});

    // ||du0||^2 in H^3_{y,mu} with mu^2 = e^y, and the share of the last cell as a tail check.
    Profile d4 = p.exact ? sample(g, [&](double y) { return p.exact(y, 4); }) : diff1(g, p.d3u0);
    Profile dens(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double w = std::exp(g.y(i));
        dens[i] = w * (p.du0[i] * p.du0[i] + p.d2u0[i] * p.d2u0[i] + p.d3u0[i] * p.d3u0[i] + d4[i] * d4[i]);
    }
    r.h3_norm_sq = integrate<double>(g, dens);
    const double tail = dens.back() * g.spacing();
    const bool finite = std::isfinite(r.h3_norm_sq) && tail <= 1e-6 * r.h3_norm_sq;
    r.clauses.push_back({"h3_finite", finite, finite ? r.h3_norm_sq : -1.0});
    return r;
}

ShearState make_shear_state(const Grid& g, double t, Profile us) {
    ShearState s;
    s.t = t;
    s.us = std::move(us);
    s.dus = diff1(g, s.us);
    s.d2us = diff1(g, s.dus);
    s.d3us = diff1(g, s.d2us);
    s.d4us = diff1(g, s.d3us);
    return s;
}

std::pair<double, double> newton_critical_point(const Grid& g, const ShearState& s, double seed) {
    double a = seed;
    for (int it = 0; it < 60; ++it) {
        const InterpValue f = interpolate(g, s.dus, a);
        if (!(std::abs(f.slope) > 1e-14)) throw NumericalAbort("critical point Newton: vanishing slope");
        const double step = f.value / f.slope;
        a -= step;
        if (!std::isfinite(a) || std::abs(a - seed) > 0.5) throw NumericalAbort("critical point Newton diverged");
        if (std::abs(step) < 1e-15) break;
    }
    const double residual = std::abs(interpolate(g, s.dus, a).value);
    if (residual > 1e-10) throw NumericalAbort("critical point Newton did not converge");
    return {a, residual};
}

HeatSolver::HeatSolver(const Grid& g, const ShearProfile& p, double dt) : grid_(&g), dt_(dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("heat solve: dt must be positive");
    if (p.u0.size() != g.size()) throw ValidationError("heat solve: profile does not match grid");
    boundary_value_ = p.u0.back();
    lower_bound_ = std::min(0.0, *std::min_element(p.u0.begin(), p.u0.end()));
    upper_bound_ = std::max(1.0, *std::max_element(p.u0.begin(), p.u0.end()));
    Profile us = p.u0;
    us.front() = 0.0;
    state_ = make_shear_state(g, 0.0, std::move(us));
    const double delta = p.params.delta;
    const double left = interpolate(g, state_.dus, 1.0 - delta).value;
    const double right = interpolate(g, state_.dus, 1.0 + delta).value;
    if (left * right < 0.0) std::tie(state_.a, state_.a_residual) = newton_critical_point(g, state_, 1.0);
}

void HeatSolver::advance() {
    const Grid& g = *grid_;
    const std::size_t n = g.size();
    const double r = dt_ / (g.spacing() * g.spacing());
    const Profile& u = state_.us;
    const std::size_t m = n - 2;
    std::vector<double> sub(m, -0.5 * r), diag(m, 1.0 + r), sup(m, -0.5 * r), rhs(m);
    for (std::size_t i = 1; i + 1 < n; ++i)
        rhs[i - 1] = (1.0 - r) * u[i] + 0.5 * r * (u[i - 1] + u[i + 1]);
    // Dirichlet data enter through the first and last rows (both old and new levels).
    rhs[m - 1] += 0.5 * r * boundary_value_;
    solve_tridiagonal<double>(sub, diag, sup, rhs);

    Profile next(n);
    next[0] = 0.0;
    next[n - 1] = boundary_value_;
    const double slack = 1e-9 * (upper_bound_ - lower_bound_);
    for (std::size_t i = 0; i < m; ++i) {
        const double v = rhs[i];
        if (!std::isfinite(v) || v < lower_bound_ - slack || v > upper_bound_ + slack)
            throw NumericalAbort("heat solve left the maximum-principle bounds; reduce dt");
        next[i + 1] = v;
    }

    const double a_prev = state_.a;
    double predictor = kNaN;
    if (state_.has_critical_point()) {
        // ODE predictor: da/dt = -d3us(a)/d2us(a), since d_t d_y us = d_y^3 us.
        const double d3 = interpolate(g, state_.d3us, a_prev).value;
        const double d2 = interpolate(g, state_.d2us, a_prev).value;
        predictor = a_prev - dt_ * d3 / d2;
    }
    state_ = make_shear_state(g, state_.t + dt_, std::move(next));
    if (predictor == predictor) std::tie(state_.a, state_.a_residual) = newton_critical_point(g, state_, predictor);
}

std::vector<ShearState> heat_solve(const Grid& g, const ShearProfile& p, double dt, double T, std::size_t stride) {
    if (!(T >= 0.0) || T > 1.0 + 1e-12) throw ValidationError("heat solve: horizon must lie in [0, 1]");
    if (stride == 0) throw ValidationError("heat solve: stride must be positive");
    const auto steps = static_cast<std::size_t>(std::llround(T / dt));
    if (std::abs(static_cast<double>(steps) * dt - T) > 1e-9 * std::max(1.0, T))
        throw ValidationError("heat solve: horizon must be a multiple of dt");
    HeatSolver solver(g, p, dt);
    std::vector<ShearState> out;
    out.push_back(solver.state());
    for (std::size_t n = 1; n <= steps; ++n) {
        solver.advance();
        if (n % stride == 0 || n == steps) out.push_back(solver.state());
    }
    return out;
}

double heat_oracle(const Grid& g, const ShearProfile& p, double t, double y, int order) {
    if (!(t >= 0.0)) throw ValidationError("heat oracle: t must be nonnegative");
    if (order < 0 || order > 3) throw ValidationError("heat oracle: derivative order must be 0..3");
    if (t == 0.0) return p.eval(g, y, order);  // the kernel's limit
    // Odd extension for orders 0 and 2, even extension for orders 1 and 3.
    const double sign = (order % 2 == 0) ? -1.0 : 1.0;
    const double four_t = 4.0 * t;
    auto integrand = [&](double yp) {
        const double k = std::exp(-(y - yp) * (y - yp) / four_t) + sign * std::exp(-(y + yp) * (y + yp) / four_t);
        return k * p.eval(g, yp, order);
    };
    const double width = 40.0 * std::sqrt(t);
    const double lo = std::max(0.0, y - width), hi = y + width;
    double total = 0.0, error_total = 0.0, scale = 0.0;
    auto piece = [&](double a, double b) {
        if (b <= a) return;
        double err = 0.0, l1 = 0.0;
        total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, a, b, 20, 1e-12, &err,
                                                                                 &l1);
        error_total += err;
        scale += l1;
    };
    piece(lo, std::max(lo, y));
    piece(std::max(lo, y), hi);
    const double norm = 1.0 / (2.0 * std::sqrt(std::numbers::pi * t));
    if (!std::isfinite(total) || error_total > 1e-8 * std::max(scale, 1e-300) + 1e-300)
        throw NumericalAbort("heat oracle quadrature did not converge");
    return norm * total;
}

DecayReport check_decay(const Grid& g, std::span<const ShearState> states) {
    DecayReport r;
    const double eps = std::numeric_limits<double>::epsilon();
    auto field = [](const ShearState& s, int k) -> const Profile& {
        switch (k) {
            case 1: return s.dus;
            case 2: return s.d2us;
            default: return s.d3us;
        }
    };
    // Constant for exponent sigma, or a negative value when the envelope keeps growing.
    auto fit = [&](double sigma, int k) {
        double best = 0.0;
        for (const auto& s : states) {
            double y_end = 0.0, peak = 0.0, y_peak = 0.0;
            const double floor = 1e4 * eps * std::pow(g.spacing(), -k);
            for (std::size_t i = 0; i < g.size(); ++i) {
                const double f = k == 0 ? std::abs(s.us[i] - 1.0) : std::abs(field(s, k)[i]);
                if (f <= floor) continue;
                y_end = g.y(i);
                const double env = f * std::exp(sigma * g.y(i));
                if (env > peak) { peak = env; y_peak = g.y(i); }
            }
            if (y_end > 0.0 && y_peak > 0.9 * y_end) return -1.0;
            best = std::max(best, peak);
        }
        return best;
    };
    for (int step = 0; step < 20; ++step) {
        const double sigma = 1.0 - 0.05 * step;
        std::array<double, 4> C{};
        bool ok = true;
        for (int k = 0; k < 4 && ok; ++k) {
            C[static_cast<std::size_t>(k)] = fit(sigma, k);
            ok = C[static_cast<std::size_t>(k)] >= 0.0;
        }
        if (ok) {
            r.sigma = sigma;
            r.C = C;
            r.unit_exponent_holds = step == 0;
            return r;
        }
    }
    r.sigma = 0.0;
    return r;
}

PersistenceResult persistence_window(const Grid& g, std::span<const ShearState> states, const ShearParams& p) {
    PersistenceResult r;
    r.min_convexity = std::numeric_limits<double>::infinity();
    r.min_monotone_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < states.size(); ++n) {
        const double conv = min_convexity(g, states[n].d2us);
        const double mono = 2.0 * monotone_ratio(g, states[n].dus, p);
        if (!(conv >= 0.5 * p.c && mono >= 1.0)) break;
        if (n == 0) r.holds_at_start = true;
        r.T1 = states[n].t;
        r.min_convexity = std::min(r.min_convexity, conv);
        r.min_monotone_ratio = std::min(r.min_monotone_ratio, mono);
    }
    return r;
}

CriticalPointTrack track_critical_point(const Grid& g, std::span<const ShearState> states, const ShearParams& p) {
    CriticalPointTrack r;
    bool inside = true;
    for (const auto& s : states) {
        if (!s.has_critical_point()) throw ValidationError("critical point tracking on a profile without one");
        // Direct root-find: the sign change of dus nearest to y = 1, then bisection.
        std::size_t best = g.size();
        for (std::size_t i = 0; i + 1 < g.size(); ++i) {
            if (g.y(i) < 0.5 || g.y(i) > 1.5) continue;
            if (s.dus[i] * s.dus[i + 1] <= 0.0 &&
                (best == g.size() || std::abs(g.y(i) - 1.0) < std::abs(g.y(best) - 1.0)))
                best = i;
        }
        double direct = kNaN;
        if (best < g.size()) {
            double lo = g.y(best > 0 ? best - 1 : 0), hi = g.y(std::min(best + 2, g.size() - 1));
            double flo = interpolate(g, s.dus, lo).value;
            for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = interpolate(g, s.dus, mid).value;
                if ((fm < 0.0) == (flo < 0.0)) { lo = mid; flo = fm; } else hi = mid;
            }
            direct = 0.5 * (lo + hi);
        }
        r.samples.push_back({s.t, s.a, s.a_residual, direct});
        r.max_residual = std::max(r.max_residual, s.a_residual);
        if (inside && std::abs(s.a - 1.0) <= 2.0 * p.delta) {
            r.T2 = s.t;
            r.max_disagreement = std::max(r.max_disagreement, std::abs(s.a - direct));
        } else {
            inside = false;
            r.exceeded = true;
        }
    }
    return r;
}

ShearEnergy shear_energy(const Grid& g, std::span<const ShearState> states) {
    ShearEnergy r;
    Profile weight = sample(g, [](double y) { return std::exp(y); });
    double integral = 0.0, prev_h4 = 0.0;
    for (std::size_t n = 0; n < states.size(); ++n) {
        const auto& s = states[n];
        const Profile d5 = diff1(g, s.d4us);
        Profile h3(g.size()), h4(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            h3[i] = weight[i] * (s.dus[i] * s.dus[i] + s.d2us[i] * s.d2us[i] + s.d3us[i] * s.d3us[i] +
                                 s.d4us[i] * s.d4us[i]);
            h4[i] = h3[i] + weight[i] * d5[i] * d5[i];
        }
        const double n3 = integrate<double>(g, h3), n4 = integrate<double>(g, h4);
        if (n > 0) integral += 0.5 * (prev_h4 + n4) * (s.t - states[n - 1].t);
        prev_h4 = n4;
        r.t.push_back(s.t);
        r.Es.push_back(n3 + integral);
    }
    for (std::size_t n = 1; n < r.t.size(); ++n)
        if (r.t[n] > 0.0) r.C = std::max(r.C, std::log(r.Es[n] / r.Es[0]) / r.t[n]);
    return r;
}

void write_shear_trace(const std::string& path, const Grid& g, std::span<const ShearState> states,
                       const ShearEnergy& energy, const ShearParams& p) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path);
    out << "t,a,min_d2us_mid,margin_mono,Es\n";
    for (std::size_t n = 0; n < states.size(); ++n) {
        const auto& s = states[n];
        out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", s.t, s.a, min_convexity(g, s.d2us),
                           monotone_ratio(g, s.dus, p), n < energy.Es.size() ? energy.Es[n] : kNaN);
    }
}

}  // namespace prandtl
