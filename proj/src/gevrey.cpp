#include "prandtl/gevrey.hpp"

#include <fmt/format.h>
#include <fmt/os.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "prandtl/error.hpp"
#include "prandtl/parallel.hpp"

namespace prandtl {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double trapezoid(const Grid& g, const Profile& f) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < f.size(); ++i) s += 0.5 * (f[i] + f[i + 1]);
    return s * g.spacing();
}

double weighted_square(const Grid& g, const CProfile& f, const Profile* mu2) {
    Profile q(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) q[i] = std::norm(f[i]) * (mu2 ? (*mu2)[i] : 1.0);
    return trapezoid(g, q);
}

}  // namespace

void validate(const GevreyParams& p, int kmax) {
    if (!(p.theta > 0.0 && p.theta <= 0.5)) throw ValidationError("gevrey.theta must lie in (0, 1/2]");
    if (!(p.theta1 > 0.0)) throw ValidationError("gevrey.theta1 must be positive");
    if (!(p.lambda > 0.0)) throw ValidationError("gevrey.lambda must be positive");
    if (!(p.T > 0.0)) throw ValidationError("time.T must be positive");
    if (!(p.lambda * p.T < 0.5)) throw ValidationError(fmt::format("lambda T = {} must stay below 1/2", p.lambda * p.T));
    if (p.check_theta1) {
        if (!(p.theta < 0.125)) throw ValidationError("gevrey.theta must be below 1/8 when theta1 is checked");
        const double alpha = 1.0 - 8.0 * p.theta;
        if (!(alpha * (1.0 + p.theta1) < 1.0))
            throw ValidationError(fmt::format("(1 - 8 theta)(1 + theta1) = {} must be below 1", alpha * (1.0 + p.theta1)));
    }
    if (gevrey_phi(p, 0.0, kmax) > 700.0) throw ValidationError("Gevrey exponent overflows at kmax");
}

double gevrey_phi(const GevreyParams& p, double t, int k) {
    const double k2 = static_cast<double>(k) * k;
    return (1.0 - p.lambda * t) * std::pow(1.0 + k2, 0.5 * (0.5 + 2.0 * p.theta));
}

SolutionState gevrey_apply(const SolutionState& s, const GevreyParams& p, double t) {
    if (!(p.lambda * t < 1.0)) throw ValidationError("gevrey_apply needs lambda t < 1");
    SolutionState out = s;
    for (auto& m : out.modes) {
        const double f = std::exp(gevrey_phi(p, t, m.k));
        for (auto& x : m.values) x *= f;
    }
    return out;
}

double horizontal_weight(int k, double s) {
    const double k2 = static_cast<double>(k) * k;
    const int whole = static_cast<int>(std::floor(s));
    double sum = 0.0, term = 1.0;
    for (int a = 0; a <= whole; ++a, term *= k2) sum += term;
    return sum * std::pow(1.0 + k2, s - whole);
}

std::vector<std::size_t> summation_order(const std::vector<ModeField>& modes) {
    std::vector<std::size_t> idx(modes.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        const int ka = modes[a].k, kb = modes[b].k;
        if (std::abs(ka) != std::abs(kb)) return std::abs(ka) < std::abs(kb);
        return ka < kb;
    });
    return idx;
}

double norm_Hsl(const Grid& g, const std::vector<ModeField>& modes, double s, int ell, Weight mu) {
    if (ell != 0 && ell != 1) throw ValidationError("norm_Hsl supports vertical order 0 or 1");
    if (!(s >= 0.0)) throw ValidationError("norm_Hsl needs s >= 0");
    Profile mu2;
    if (mu == Weight::exp_half) mu2 = sample(g, [](double y) { return std::exp(y); });
    const Profile* w = mu == Weight::exp_half ? &mu2 : nullptr;
    double sum = 0.0;
    for (std::size_t j : summation_order(modes)) {
        double part = weighted_square(g, modes[j].values, w);
        if (ell == 1) part += weighted_square(g, diff1(g, modes[j].values), w);
        sum += horizontal_weight(modes[j].k, s) * part;
    }
    return kTwoPi * sum;
}

double norm_Hsl(const Grid& g, const SolutionState& s, double order, int ell, Weight mu) {
    return norm_Hsl(g, s.modes, order, ell, mu);
}

double EnergySample::norm(const std::string& field, double s) const {
    const FieldIntegrals& f = fields.at(field);
    double sum = 0.0;
    for (std::size_t j = 0; j < f.k.size(); ++j) sum += horizontal_weight(f.k[j], s) * f.value[j];
    return kTwoPi * sum;
}

double EnergySample::dnorm(const std::string& field, double s) const {
    const FieldIntegrals& f = fields.at(field);
    double sum = 0.0;
    for (std::size_t j = 0; j < f.k.size(); ++j) sum += horizontal_weight(f.k[j], s) * f.slope[j];
    return kTwoPi * sum;
}

namespace {

const char* const kFields[] = {"w1bar", "w2bar", "w2phi", "h", "h1bar", "u", "u_mu"};

}  // namespace

EnergySample energy_sample(const Grid& g, const SolutionState& u, const ShearState& shear, const CutoffSet& cuts,
                           const GevreyParams& p, int threads) {
    const std::size_t n = g.size(), modes = u.modes.size();
    const GoodUnknowns gu = good_unknowns(g, u, shear, cuts, threads);
    const Profile mu2 = sample(g, [](double y) { return std::exp(y); });
    Profile vphi(n);
    for (std::size_t i = 0; i < n; ++i) vphi[i] = std::pow(std::max(cuts.varphi[i], 0.0), 0.5 * (1.0 + p.theta1));

    // [mode][field] -> (value, slope)
    std::vector<std::array<std::pair<double, double>, 7>> per(modes);
    parallel_for(modes, threads, [&](std::size_t j) {
        const ModeUnknowns& m = gu.modes[j];
        const double f2 = std::exp(2.0 * gevrey_phi(p, u.t, m.k));
        auto both = [&](const CProfile& f, const Profile* w) {
            return std::pair{f2 * weighted_square(g, f, w), f2 * weighted_square(g, diff1(g, f), w)};
        };
        per[j][0] = both(m.w1bar, nullptr);
        per[j][1] = both(m.w2bar, nullptr);
        CProfile wp(n), dwp(n);
        const CProfile dw2 = diff1(g, m.w2);
        for (std::size_t i = 0; i < n; ++i) {
            wp[i] = vphi[i] * m.w2[i];
            dwp[i] = vphi[i] * dw2[i];
        }
        per[j][2] = {f2 * weighted_square(g, wp, nullptr), f2 * weighted_square(g, dwp, nullptr)};
        per[j][3] = both(m.h, nullptr);
        CProfile h1bar(n);
        for (std::size_t i = 0; i < n; ++i) h1bar[i] = cuts.phi3[i] * m.h1[i];
        per[j][4] = both(h1bar, nullptr);
        per[j][5] = both(u.modes[j].values, nullptr);
        per[j][6] = both(u.modes[j].values, &mu2);
    });

    EnergySample s;
    s.t = u.t;
    for (std::size_t f = 0; f < 7; ++f) {
        FieldIntegrals& fi = s.fields[kFields[f]];
        for (std::size_t j : summation_order(u.modes)) {
            fi.k.push_back(u.modes[j].k);
            fi.value.push_back(per[j][f].first);
            fi.slope.push_back(per[j][f].second);
        }
    }
    const double th = p.theta;
    s.E = s.norm("w1bar", 0.5) + s.norm("w2bar", 0.375) + s.norm("w2phi", 0.5) + s.norm("h", 0.0);
    s.D = s.dnorm("w1bar", 0.5) + s.dnorm("w2bar", 0.375) + s.dnorm("w2phi", 0.5) + s.dnorm("h", 0.0);
    s.G = s.norm("w1bar", 0.75 + th) + s.norm("w2bar", 0.625 + th) + s.norm("w2phi", 0.75 + th) +
          s.norm("h", 0.25 + th);
    return s;
}

std::vector<EnergySample> energy_suite(const Grid& g, const Trajectory& traj, const GevreyParams& p, double delta,
                                       double c, int threads) {
    std::vector<EnergySample> out;
    out.reserve(traj.states.size());
    for (std::size_t s = 0; s < traj.states.size(); ++s) {
        const CutoffSet cuts = build_cutoffs(g, delta, traj.shears[s].a, c);
        out.push_back(energy_sample(g, traj.states[s], traj.shears[s], cuts, p, threads));
    }
    return out;
}

namespace {

std::vector<double> time_derivative(const std::vector<EnergySample>& s, const std::vector<double>& f) {
    const std::size_t n = f.size();
    std::vector<double> d(n, 0.0);
    if (n < 2) return d;
    d[0] = (f[1] - f[0]) / (s[1].t - s[0].t);
    d[n - 1] = (f[n - 1] - f[n - 2]) / (s[n - 1].t - s[n - 2].t);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (s[i + 1].t - s[i - 1].t);
    return d;
}

}  // namespace

MasterReport verify_master_inequality(const std::vector<EnergySample>& samples, const GevreyParams& p) {
    if (samples.size() < 10) throw ValidationError("master inequality needs at least ten samples");
    const std::size_t n = samples.size();
    std::vector<double> E(n);
    for (std::size_t i = 0; i < n; ++i) E[i] = samples[i].E;
    MasterReport r;
    r.dEdt = time_derivative(samples, E);
    double best = -INFINITY;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!(E[i] > kEnergyFloor)) continue;
        r.vacuous = false;
        best = std::max(best, (r.dEdt[i] + p.lambda * samples[i].G + samples[i].D) / E[i]);
    }
    r.C_hat = r.vacuous ? 0.0 : best;
    r.margin.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        r.margin[i] = r.C_hat * E[i] - (r.dEdt[i] + p.lambda * samples[i].G + samples[i].D);
    if (r.vacuous || !(E[0] > kEnergyFloor)) return r;

    double intG = 0.0, intD = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) {
            const double h = samples[i].t - samples[i - 1].t;
            intG += 0.5 * h * (samples[i].G + samples[i - 1].G);
            intD += 0.5 * h * (samples[i].D + samples[i - 1].D);
        }
        const double bound = E[0] * std::exp(r.C_hat * (samples[i].t - samples[0].t));
        r.gronwall_ratio = std::max(r.gronwall_ratio, E[i] / bound);
        r.integrated_ratio = std::max(r.integrated_ratio, (E[i] + p.lambda * intG + intD) / bound);
    }
    r.gronwall_holds = r.gronwall_ratio <= 1.0 + 1e-9;
    return r;
}

namespace {

struct Term {
    std::string field;
    double s;
    bool slope;  // d_y part only
    bool full;   // value + slope, i.e. vertical order one
};

double evaluate(const EnergySample& e, const Term& t) {
    if (t.full) return e.norm(t.field, t.s) + e.dnorm(t.field, t.s);
    return t.slope ? e.dnorm(t.field, t.s) : e.norm(t.field, t.s);
}

struct Inequality {
    std::string name;
    Term N, G, D;
    bool lambda_minus_C;
    std::vector<Term> R;
    double delta2 = 0.0;
    Term extra{};
};

InequalityFit fit(const std::vector<EnergySample>& s, const GevreyParams& p, const Inequality& q) {
    const std::size_t n = s.size();
    std::vector<double> N(n);
    for (std::size_t i = 0; i < n; ++i) N[i] = evaluate(s[i], q.N);
    const std::vector<double> dN = time_derivative(s, N);
    InequalityFit f{q.name};
    f.delta2 = q.delta2;
    double best = -INFINITY;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        double lhs = dN[i] + p.lambda * evaluate(s[i], q.G) + evaluate(s[i], q.D);
        if (q.delta2 > 0.0) lhs -= q.delta2 * evaluate(s[i], q.extra);
        double rhs = 0.0;
        for (const Term& t : q.R) rhs += evaluate(s[i], t);
        if (q.lambda_minus_C) rhs += evaluate(s[i], q.G);
        if (!(rhs > kEnergyFloor)) {
            if (lhs > kEnergyFloor) f.degenerate = true;
            continue;
        }
        f.vacuous = false;
        best = std::max(best, lhs / rhs);
    }
    f.C = f.vacuous ? 0.0 : best;
    return f;
}

}  // namespace

std::vector<InequalityFit> verify_component_inequalities(const std::vector<EnergySample>& samples,
                                                         const GevreyParams& p, bool include_h1) {
    if (samples.size() < 3) throw ValidationError("component inequalities need at least three samples");
    const double th = p.theta;
    const Term u14mu{"u_mu", 0.25, false, true}, u14{"u", 0.25, false, true};
    auto N = [](const char* f, double s) { return Term{f, s, false, false}; };
    auto D = [](const char* f, double s) { return Term{f, s, true, false}; };

    std::vector<Inequality> qs = {
        {"w1bar", N("w1bar", 0.5), N("w1bar", 0.75 + th), D("w1bar", 0.5), true,
         {u14mu, N("w1bar", 0.5), N("w2bar", 0.5)}},
        {"w2bar", N("w2bar", 0.375), N("w2bar", 0.625 + th), D("w2bar", 0.375), true,
         {u14, N("w1bar", 0.5), N("w2bar", 0.375)}},
        {"h", N("h", 0.0), N("h", 0.25 + th), D("h", 0.0), false,
         {N("h", 0.0), u14, N("w1bar", 0.75), N("w2bar", 0.625), N("w2phi", 0.75)}},
    };
    for (double d2 : {0.1, 0.01}) {
        Inequality q{fmt::format("w2_weighted(delta2={})", d2), N("w2phi", 0.5), N("w2phi", 0.75 + th),
                     D("w2phi", 0.5), true, {u14, N("w1bar", 0.5), N("w2bar", 0.625), N("w2phi", 0.5)}};
        q.delta2 = d2;
        q.extra = D("w2bar", 0.375);
        qs.insert(qs.begin() + 2 + (d2 < 0.05 ? 1 : 0), q);
    }
    if (include_h1) {
        const std::vector<Term> tail = {N("h", 0.0), u14, N("w1bar", 0.75), N("w2bar", 0.75)};
        qs.push_back({"h1:w1bar", N("w1bar", 0.5), N("w1bar", 0.75), D("w1bar", 0.5), true,
                      {u14mu, N("w1bar", 0.5), N("w2bar", 0.5)}});
        qs.push_back({"h1:w2bar", N("w2bar", 0.5), N("w2bar", 0.75), D("w2bar", 0.5), true,
                      {u14, N("w1bar", 0.5), N("w2bar", 0.5), N("h1bar", 0.25)}});
        qs.push_back({"h1:h", N("h", 0.0), N("h", 0.25), D("h", 0.0), false, tail});
        qs.push_back({"h1:h1bar", N("h1bar", 0.0), N("h1bar", 0.25), D("h1bar", 0.0), true, tail});
    }
    std::vector<InequalityFit> out;
    for (const auto& q : qs) out.push_back(fit(samples, p, q));
    return out;
}

IdentityReport check_identities(const Grid& g, const Trajectory& traj, std::size_t step, const GevreyParams& p,
                                double delta, double c) {
    if (step == 0 || step + 1 >= traj.states.size())
        throw ValidationError("check_identities needs a stored step with two neighbours");
    const std::size_t n = g.size();
    const SolutionState& st = traj.states[step];
    const ShearState& sh = traj.shears[step];
    const CutoffSet cuts = build_cutoffs(g, delta, sh.a, c);
    IdentityReport r;

    double div = 0.0, loc_l = 0.0, loc_r = 0.0;
    for (std::size_t j : summation_order(st.modes)) {
        const ModeField& m = st.modes[j];
        const double f2 = std::exp(2.0 * gevrey_phi(p, st.t, m.k));
        const CProfile v = compute_v(g, m), uy = diff1(g, m.values);
        Profile a(n), bl(n), br(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double re = std::real(v[i] * std::conj(uy[i]));
            a[i] = re;
            bl[i] = -cuts.phi3[i] * cuts.phi3[i] * re;
            br[i] = 2.0 * cuts.dphi3[i] * cuts.phi3[i] * std::real(v[i] * std::conj(m.values[i]));
        }
        div += f2 * trapezoid(g, a);
        loc_l += f2 * trapezoid(g, bl);
        loc_r += f2 * trapezoid(g, br);
        r.divergence_scale += f2 * l2_norm(g, v) * l2_norm(g, uy);
    }
    r.divergence = std::abs(div);
    r.localized_lhs = loc_l;
    r.localized_rhs = loc_r;
    r.localized_scale = r.divergence_scale;

    // d_t d - d_yy d against its closed form on supp phi3.
    const ShearState& prev = traj.shears[step - 1];
    const ShearState& next = traj.shears[step + 1];
    const Profile d = weight_d(sh, cuts);
    const Profile dm = weight_d(prev, build_cutoffs(g, delta, prev.a, c));
    const Profile dp = weight_d(next, build_cutoffs(g, delta, next.a, c));
    const Profile dyy = diff2(g, d);
    const double two_dt = next.t - prev.t;
    Profile res(n, 0.0), ref(n, 0.0);
    for (std::size_t i = kResidualMargin; i + kResidualMargin < n; ++i) {
        if (!(cuts.phi3[i] > 0.0)) continue;
        const double g2 = sh.d2us[i], g3 = sh.d3us[i], s12 = std::sqrt(g2);
        const double closed = g3 * cuts.dphi3[i] / (g2 * s12) - cuts.d2phi3[i] / s12 -
                              0.75 * g3 * g3 * cuts.phi3[i] / (g2 * g2 * s12);
        res[i] = (dp[i] - dm[i]) / two_dt - dyy[i] - closed;
        ref[i] = closed;
    }
    r.weight_residual = l2_norm(g, res);
    r.weight_scale = l2_norm(g, ref);
    return r;
}

RecoveryFit check_recovery(const std::vector<EnergySample>& samples, const GevreyParams& p) {
    RecoveryFit f;
    const double s = 0.25 + p.theta;
    for (const auto& e : samples) {
        const double lhs = std::sqrt(e.norm("u_mu", s) + e.dnorm("u_mu", s));
        const double rhs = std::sqrt(e.norm("w1bar", 0.5)) + std::sqrt(e.norm("h", s));
        if (!(rhs > 1e-15)) {
            if (lhs > 1e-15) f.degenerate = true;
            continue;
        }
        f.vacuous = false;
        f.C = std::max(f.C, lhs / rhs);
    }
    return f;
}

void write_energy_trace(const std::string& path, const std::vector<EnergySample>& samples, const MasterReport& m) {
    auto out = fmt::output_file(path);
    out.print("t,E,D,G,dEdt,margin\n");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        out.print("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", s.t, s.E, s.D, s.G,
                  i < m.dEdt.size() ? m.dEdt[i] : 0.0, i < m.margin.size() ? m.margin[i] : 0.0);
    }
}

}  // namespace prandtl
