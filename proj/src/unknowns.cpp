#include "prandtl/unknowns.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "prandtl/error.hpp"
#include "prandtl/parallel.hpp"

namespace prandtl {

namespace {

constexpr Complex I{0.0, 1.0};

Ramp ramp_down(double y, double y0, double y1) {
    const Ramp r = ramp_up(y, y0, y1);
    return {1.0 - r.value, -r.d1, -r.d2};
}

Ramp product(Ramp a, Ramp b) {
    return {a.value * b.value, a.d1 * b.value + a.value * b.d1, a.d2 * b.value + 2.0 * a.d1 * b.d1 + a.value * b.d2};
}

Ramp phi1_ramp(double y, double delta) {
    if (y < 1.0) return ramp_down(y, 1.0 - 2.0 * delta, 1.0 - delta);
    return ramp_up(y, 1.0 + delta, 1.0 + 2.0 * delta);
}

Ramp psi2_ramp(double y, double delta) {
    return product(ramp_up(y, 1.0 - 3.0 * delta, 1.0 - 2.0 * delta), ramp_down(y, 1.0 + 2.0 * delta, 1.0 + 3.0 * delta));
}

Ramp phi3_ramp(double y) { return product(ramp_up(y, 0.5, 0.75), ramp_down(y, 1.75, 2.0)); }

Ramp varphi_ramp(double y, double a, double delta, double width) {
    const double z = y - a, az = std::abs(z), s = z < 0.0 ? -1.0 : 1.0;
    const double q = az + width;
    const Ramp m{z * z / q, s * (z * z + 2.0 * width * az) / (q * q), 2.0 * width * width / (q * q * q)};
    const Ramp bump = product(ramp_up(y, 1.0 - 2.0 * delta, 1.0 - 1.5 * delta),
                              ramp_down(y, 1.0 + 1.5 * delta, 1.0 + 2.0 * delta));
    return product(m, bump);
}

// Where a stencil of half-width two can still be evaluated from pointwise data.
std::vector<bool> dilate(const std::vector<bool>& mask, std::size_t by) {
    std::vector<bool> out(mask.size(), false);
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (!mask[i]) continue;
        const std::size_t lo = i >= by ? i - by : 0, hi = std::min(mask.size() - 1, i + by);
        for (std::size_t j = lo; j <= hi; ++j) out[j] = true;
    }
    return out;
}

CProfile times(const Profile& a, const CProfile& b) {
    CProfile out(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

CProfile ddiff(const Grid& g, const CProfile& f) { return diff1(g, diff1(g, f)); }

// [A, d_y^2] f = A f'' - (A f)'' with the same derivative chain as the unknowns.
CProfile commutator(const Grid& g, const Profile& A, const CProfile& f) {
    const CProfile lhs = times(A, ddiff(g, f));
    const CProfile rhs = ddiff(g, times(A, f));
    CProfile out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = lhs[i] - rhs[i];
    return out;
}

void check_shear_clauses(const Grid& g, const ShearState& shear, const CutoffSet& cuts) {
    const ShearParams p{cuts.c, cuts.delta};
    const double conv = min_convexity(g, shear.d2us);
    const double mono = 2.0 * monotone_ratio(g, shear.dus, p);
    if (!(conv >= 0.5 * cuts.c) || !(mono >= 1.0))
        throw ValidationError(fmt::format("shear fails the persistence clauses at t={} (convexity {}, monotone ratio {})",
                                          shear.t, conv, mono));
}

Complex interpolate_complex(const Grid& g, const CProfile& f, double y) {
    Profile re(f.size()), im(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        re[i] = f[i].real();
        im[i] = f[i].imag();
    }
    return {interpolate(g, re, y).value, interpolate(g, im, y).value};
}

}  // namespace

Ramp ramp_up(double y, double y0, double y1) {
    if (y <= y0) return {0.0, 0.0, 0.0};
    if (y >= y1) return {1.0, 0.0, 0.0};
    const double w = y1 - y0, r = (y - y0) / w;
    // C4 smoothstep: the stencil checks need the ramps smoother than C2.
    const double r2 = r * r, r4 = r2 * r2, s = 1.0 - r, s2 = s * s;
    return {r4 * r * (126.0 - 420.0 * r + 540.0 * r2 - 315.0 * r2 * r + 70.0 * r4), 630.0 * r4 * s2 * s2 / w,
            2520.0 * r2 * r * s2 * s * (1.0 - 2.0 * r) / (w * w)};
}

double CutoffSet::phi1_at(double y) const { return phi1_ramp(y, delta).value; }
double CutoffSet::psi2_at(double y) const { return psi2_ramp(y, delta).value; }
double CutoffSet::phi3_at(double y) const { return phi3_ramp(y).value; }
double CutoffSet::varphi_at(double y) const { return varphi_ramp(y, a, delta, mollifier).value; }

CutoffSet build_cutoffs(const Grid& g, double delta, double a, double c) {
    if (!(delta > 0.0) || delta > 0.125 + 1e-15)
        throw ValidationError(fmt::format("cutoff delta must lie in (0, 1/8], got {}", delta));
    if (!(std::abs(a - 1.0) <= 2.0 * delta))
        throw ValidationError(fmt::format("critical point a={} outside [1-2delta, 1+2delta]", a));
    CutoffSet s;
    s.delta = delta;
    s.a = a;
    s.c = c;
    s.mollifier = g.spacing();
    const std::size_t n = g.size();
    for (Profile* p : {&s.phi1, &s.psi1, &s.psi2, &s.phi3, &s.varphi, &s.dpsi1, &s.d2psi1, &s.dpsi2, &s.d2psi2,
                       &s.dphi3, &s.d2phi3, &s.dvarphi})
        p->assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double y = g.y(i), e = std::exp(-0.5 * y);
        const Ramp p1 = phi1_ramp(y, delta);
        s.phi1[i] = p1.value;
        s.psi1[i] = e * p1.value;
        s.dpsi1[i] = e * (p1.d1 - 0.5 * p1.value);
        s.d2psi1[i] = e * (p1.d2 - p1.d1 + 0.25 * p1.value);
        const Ramp p2 = psi2_ramp(y, delta);
        s.psi2[i] = p2.value;
        s.dpsi2[i] = p2.d1;
        s.d2psi2[i] = p2.d2;
        const Ramp p3 = phi3_ramp(y);
        s.phi3[i] = p3.value;
        s.dphi3[i] = p3.d1;
        s.d2phi3[i] = p3.d2;
        const Ramp vp = varphi_ramp(y, a, delta, s.mollifier);
        s.varphi[i] = vp.value;
        s.dvarphi[i] = vp.d1;
    }
    return s;
}

Profile weight_d(const ShearState& shear, const CutoffSet& cuts) {
    Profile d(shear.d2us.size(), 0.0);
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (cuts.phi3[i] <= 0.0) continue;
        if (!(shear.d2us[i] >= 1e-12)) throw ValidationError("division guard: d2us vanishes inside supp phi3");
        d[i] = cuts.phi3[i] / std::sqrt(shear.d2us[i]);
    }
    return d;
}

ModeUnknowns mode_unknowns(const Grid& g, const ModeField& m, const ShearState& shear, const CutoffSet& cuts,
                           const Profile& d) {
    const std::size_t n = g.size();
    const CProfile& u = m.values;
    const CProfile uy = diff1(g, u);
    const CProfile uyy = diff1(g, uy);
    ModeUnknowns r;
    r.k = m.k;
    for (CProfile* f : {&r.w1, &r.w1bar, &r.w2, &r.w2bar, &r.h, &r.h1}) f->assign(n, Complex{});
    for (std::size_t i = 0; i < n; ++i) {
        const double p = shear.dus[i], pp = shear.d2us[i];
        r.w2[i] = p * uy[i] - u[i] * pp;
        r.w2bar[i] = cuts.psi2[i] * r.w2[i];
        if (cuts.phi1[i] > 0.0) {
            if (!(std::abs(p) >= 1e-12)) throw ValidationError("division guard: dus vanishes inside supp phi1");
            // Quotient rule form of d_y(u / dus); equals w2 / dus^2 identically.
            r.w1[i] = r.w2[i] / (p * p);
            r.w1bar[i] = cuts.psi1[i] * r.w1[i];
        }
        if (cuts.phi3[i] > 0.0) {
            if (!(pp >= 1e-12)) throw ValidationError("division guard: d2us vanishes inside supp phi3");
            r.h[i] = d[i] * uy[i];
            r.h1[i] = uyy[i] - (shear.d3us[i] / pp) * uy[i];
        }
    }
    const double d2a = interpolate(g, shear.d2us, shear.a).value;
    const double p2 = interpolate(g, shear.dus, 2.0).value;
    r.J = d2a * interpolate_complex(g, u, 2.0) / p2;
    return r;
}

GoodUnknowns good_unknowns(const Grid& g, const SolutionState& u, const ShearState& shear, const CutoffSet& cuts,
                           int threads) {
    check_shear_clauses(g, shear, cuts);
    GoodUnknowns out;
    out.d = weight_d(shear, cuts);
    out.modes.resize(u.modes.size());
    parallel_for(u.modes.size(), threads,
                 [&](std::size_t j) { out.modes[j] = mode_unknowns(g, u.modes[j], shear, cuts, out.d); });
    return out;
}

F1Result forcing_F1(const Grid& g, const ModeField& m, const ShearState& shear, const CutoffSet& cuts) {
    const std::size_t n = g.size();
    const CProfile& u = m.values;
    const CProfile uy = diff1(g, u);
    const CProfile uyy = diff1(g, uy);
    Profile inv(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(shear.dus[i]) >= 1e-12) inv[i] = 1.0 / shear.dus[i];
    const CProfile comm = [&] {
        // [d_y^2, B] u = (B u)'' - B u''
        const CProfile a = ddiff(g, times(inv, u));
        const CProfile b = times(inv, ddiff(g, u));
        CProfile c(n);
        for (std::size_t i = 0; i < n; ++i) c[i] = a[i] - b[i];
        return c;
    }();
    F1Result r;
    r.F1.assign(n, Complex{});
    r.psi1_dF1.assign(n, Complex{});
    r.defining.assign(n, Complex{});
    for (std::size_t i = 0; i < n; ++i) {
        if (cuts.phi1[i] <= 0.0) continue;
        const double p = shear.dus[i], pp = shear.d2us[i], ppp = shear.d3us[i];
        if (!(std::abs(p) >= 1e-12)) throw ValidationError("division guard: dus vanishes inside supp psi1");
        const double a = -2.0 * pp * pp / (p * p * p), b = 2.0 * pp / (p * p);
        const double da = -2.0 * (2.0 * pp * ppp / (p * p * p) - 3.0 * pp * pp * pp / (p * p * p * p));
        const double db = 2.0 * (ppp / (p * p) - 2.0 * pp * pp / (p * p * p));
        r.F1[i] = a * u[i] + b * uy[i];
        r.psi1_dF1[i] = cuts.psi1[i] * (da * u[i] + a * uy[i] + db * uy[i] + b * uyy[i]);
        r.defining[i] = -u[i] * ppp / (p * p) - comm[i];
    }
    return r;
}

F2Result forcing_F2(const Grid& g, const ModeField& m, const ShearState& shear) {
    const std::size_t n = g.size();
    const CProfile& u = m.values;
    const CProfile uy = diff1(g, u);
    const CProfile uyy = diff1(g, uy);
    const CProfile c1 = commutator(g, shear.dus, uy);
    const CProfile c2 = commutator(g, shear.d2us, u);
    F2Result r;
    r.reduced.resize(n);
    r.defining.resize(n);
    r.identity_lhs.resize(n);
    r.identity_rhs.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        r.reduced[i] = -2.0 * shear.d2us[i] * uyy[i] + 2.0 * shear.d3us[i] * uy[i];
        r.identity_lhs[i] = -u[i] * shear.d4us[i] - c2[i];
        r.identity_rhs[i] = 2.0 * shear.d3us[i] * uy[i];
        r.defining[i] = shear.d3us[i] * uy[i] + c1[i] + r.identity_lhs[i];
    }
    return r;
}

Decomposition decompose_u(const Grid& g, const SolutionState& u, const ShearState& shear, const CutoffSet& cuts) {
    const double a = shear.a, delta = cuts.delta, h = g.spacing();
    if (!(std::abs(a - 1.0) <= 2.0 * delta)) throw ValidationError("decomposition needs |a - 1| <= 2 delta");
    const std::size_t n = g.size();
    const std::size_t ja = g.floor_index(a);
    // Branch points on nodes: 1 - 2 delta from below, 1 + 2 delta from above, 2 nearest.
    const std::size_t i1 = g.floor_index(1.0 - 2.0 * delta);
    std::size_t i3 = g.floor_index(1.0 + 2.0 * delta);
    if (g.y(i3) < 1.0 + 2.0 * delta - 1e-12 * g.length()) ++i3;
    const std::size_t i2 = g.nearest(2.0);
    if (!(i1 < ja && ja + 1 < i3 && i3 <= i2 && i2 < n)) throw ValidationError("decomposition: branch points out of order");

    Decomposition out;
    out.a_cell = ja;
    // Cell weights phi1 or psi2 on each branch must be exactly one; anything else
    // means the branch points do not sit on the grid.
    Profile weight(n - 1);
    for (std::size_t l = 0; l + 1 < n; ++l) {
        const double mid = g.y(l) + 0.5 * h;
        const bool middle = (l >= i1 && l < ja) || (l > ja && l < i3);
        weight[l] = middle ? cuts.psi2_at(mid) : cuts.phi1_at(mid);
        if (l != ja) out.branch_mismatch = std::max(out.branch_mismatch, std::abs(1.0 - weight[l]));
    }
    if (out.branch_mismatch > 1e-6)
        throw ValidationError(fmt::format("decomposition branch-boundary mismatch {:.3g}; put 1 +- 2 delta on nodes",
                                          out.branch_mismatch));

    for (const ModeField& m : u.modes) {
        CProfile q(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (shear.dus[i] == 0.0) throw ValidationError("decomposition: dus vanishes on a node");
            q[i] = m.values[i] / shear.dus[i];
        }
        // Cell integrals of w1 (or w2bar / dus^2): weight * (q_{l+1} - q_l).
        CProfile cell(n - 1);
        for (std::size_t l = 0; l + 1 < n; ++l) cell[l] = weight[l] * (q[l + 1] - q[l]);
        // Prefix sums S[i] = sum_{l < i} cell[l].
        CProfile S(n, Complex{});
        for (std::size_t i = 1; i < n; ++i) S[i] = S[i - 1] + (i - 1 == ja ? Complex{} : cell[i - 1]);
        auto sum = [&](std::size_t from, std::size_t to) { return S[to] - S[from]; };  // cells [from, to)

        ModeDecomposition d;
        d.k = m.k;
        d.u1.assign(n, Complex{});
        d.u2.assign(n, Complex{});
        const Complex q2 = q[i2];
        for (std::size_t i = 0; i < n; ++i) {
            const double p = shear.dus[i];
            Complex integral;
            if (i <= i1) integral = sum(0, i);
            else if (i <= ja) integral = sum(0, i1) + sum(i1, i);
            else if (i < i3) integral = -sum(i, i3) - sum(i3, i2);
            else integral = i >= i2 ? sum(i2, i) : -sum(i, i2);
            d.u1[i] = p * integral;
            if (i > ja) d.u2[i] = p * q2;
        }
        d.J = interpolate(g, shear.d2us, a).value * q2;

        // One-sided derivatives at a from quadratic fits through three nodes on each side.
        auto slope_at = [&](std::size_t i0) {
            const double x0 = g.y(i0), x1 = g.y(i0 + 1), x2 = g.y(i0 + 2);
            const Complex f0 = d.u1[i0], f1 = d.u1[i0 + 1], f2 = d.u1[i0 + 2];
            const Complex d01 = (f1 - f0) / (x1 - x0), d12 = (f2 - f1) / (x2 - x1), d012 = (d12 - d01) / (x2 - x0);
            return d01 + d012 * ((a - x0) + (a - x1));
        };
        d.du1_below = slope_at(ja - 2);
        d.du1_above = slope_at(ja + 1);

        double umax = 0.0, err = 0.0;
        for (std::size_t i = 0; i < n; ++i) umax = std::max(umax, std::abs(m.values[i]));
        for (std::size_t i = 0; i < n; ++i)
            if (i != ja && i != ja + 1) err = std::max(err, std::abs(d.u1[i] + d.u2[i] - m.values[i]));
        d.reconstruction_error = umax > 0.0 ? err / umax : err;
        out.modes.push_back(std::move(d));
    }
    return out;
}

std::string to_string(Transformed which) {
    switch (which) {
        case Transformed::w1bar: return "w1bar";
        case Transformed::w2bar: return "w2bar";
        case Transformed::h: return "h";
        default: return "h1";
    }
}

namespace {

// The transformed unknown on a neighbourhood large enough for the stencils,
// built pointwise exactly as mode_unknowns does.
struct Extended {
    CProfile W;     // the unknown whose equation is checked
    CProfile aux;   // w1 (for w1bar) or w2 (for w2bar, h1) on the neighbourhood
};

Extended extended_unknown(Transformed which, const Grid& g, const CProfile& u, const ShearState& sh,
                          const CutoffSet& cuts, const std::vector<bool>& region) {
    const std::size_t n = g.size();
    const CProfile uy = diff1(g, u);
    const CProfile uyy = diff1(g, uy);
    Extended e;
    e.W.assign(n, Complex{});
    e.aux.assign(n, Complex{});
    for (std::size_t i = 0; i < n; ++i) {
        const double p = sh.dus[i], pp = sh.d2us[i];
        const Complex w2 = p * uy[i] - u[i] * pp;
        switch (which) {
            case Transformed::w1bar:
                if (region[i]) {
                    e.aux[i] = w2 / (p * p);
                    e.W[i] = cuts.psi1[i] * e.aux[i];
                }
                break;
            case Transformed::w2bar:
                e.aux[i] = w2;
                e.W[i] = cuts.psi2[i] * w2;
                break;
            case Transformed::h:
                if (cuts.phi3[i] > 0.0) e.W[i] = cuts.phi3[i] / std::sqrt(pp) * uy[i];
                break;
            case Transformed::h1:
                e.aux[i] = w2;
                if (region[i]) e.W[i] = uyy[i] - (sh.d3us[i] / pp) * uy[i];
                break;
        }
    }
    return e;
}

}  // namespace

ResidualReport residual_transformed(Transformed which, const Grid& g, const Trajectory& traj, double delta, double c) {
    if (traj.states.size() < 3) throw ValidationError("residual needs at least three stored steps");
    const std::size_t n = g.size();
    ResidualReport r;
    for (std::size_t s = 1; s + 1 < traj.states.size(); ++s) {
        const ShearState& sh = traj.shears[s];
        const CutoffSet cuts = build_cutoffs(g, delta, sh.a, c);
        // Where the pointwise formulas are evaluated, and where the residual is measured.
        std::vector<bool> support(n), region(n), measure(n);
        for (std::size_t i = 0; i < n; ++i) {
            switch (which) {
                case Transformed::w1bar: support[i] = cuts.phi1[i] > 0.0; break;
                case Transformed::h1: support[i] = cuts.phi3[i] > 0.0; break;
                default: support[i] = true;
            }
        }
        region = dilate(support, 4);
        // w1 is only defined away from the critical point.
        if (which == Transformed::w1bar)
            for (std::size_t i = 0; i < n; ++i)
                if (std::abs(g.y(i) - sh.a) < 0.5 * delta) region[i] = false;
        for (std::size_t i = 0; i < n; ++i)
            measure[i] = support[i] && i >= kResidualMargin && i + kResidualMargin < n;

        const Profile d = weight_d(sh, cuts);
        Profile r_ratio(n, 0.0);  // d3us / d2us for h1
        if (which == Transformed::h1)
            for (std::size_t i = 0; i < n; ++i)
                if (region[i]) r_ratio[i] = sh.d3us[i] / sh.d2us[i];
        const Profile dr = hi::diff1<double>(g, r_ratio), d2r = hi::diff2<double>(g, r_ratio);
        const Profile d5 = hi::diff1<double>(g, sh.d4us);

        std::vector<double> per_mode;
        for (std::size_t j = 0; j < traj.states[s].modes.size(); ++j) {
            const CProfile& u = traj.states[s].modes[j].values;
            const double k = traj.states[s].modes[j].k;
            const double eps = traj.states[s].epsilon;
            const Extended prev = extended_unknown(which, g, traj.states[s - 1].modes[j].values, traj.shears[s - 1],
                                                   build_cutoffs(g, delta, traj.shears[s - 1].a, c), region);
            const Extended next = extended_unknown(which, g, traj.states[s + 1].modes[j].values, traj.shears[s + 1],
                                                   build_cutoffs(g, delta, traj.shears[s + 1].a, c), region);
            const Extended cur = extended_unknown(which, g, u, sh, cuts, region);
            const double two_dt = traj.states[s + 1].t - traj.states[s - 1].t;
            const CProfile Wyy = hi::diff2<Complex>(g, cur.W);
            const CProfile uy = hi::diff1<Complex>(g, u), uyy = hi::diff2<Complex>(g, u);
            const CProfile aux_y = hi::diff1<Complex>(g, cur.aux);
            // w1 and F1 behave like powers of 1/(y - a) near the edge of supp phi1,
            // too steep for stencils, so their y-derivatives are taken pointwise.
            CProfile w1y, F1y, v;
            if (which == Transformed::w1bar) {
                w1y.assign(n, Complex{});
                F1y.assign(n, Complex{});
                for (std::size_t i = 0; i < n; ++i) {
                    if (!region[i]) continue;
                    const double p = sh.dus[i], pp = sh.d2us[i], ppp = sh.d3us[i];
                    const Complex w2 = p * uy[i] - u[i] * pp, w2y = p * uyy[i] - u[i] * ppp;
                    w1y[i] = w2y / (p * p) - 2.0 * w2 * pp / (p * p * p);
                    const double a = -2.0 * pp * pp / (p * p * p), b = 2.0 * pp / (p * p);
                    const double da = -2.0 * (2.0 * pp * ppp / (p * p * p) - 3.0 * pp * pp * pp / (p * p * p * p));
                    const double db = 2.0 * (ppp / (p * p) - 2.0 * pp * pp / (p * p * p));
                    F1y[i] = da * u[i] + (a + db) * uy[i] + b * uyy[i];
                }
            }
            if (which == Transformed::h) {
                v = hi::cumulative_integral<Complex>(g, u);
                for (auto& x : v) x *= -I * k;
            }
            CProfile res(n, Complex{});
            for (std::size_t i = 0; i < n; ++i) {
                if (!measure[i]) continue;
                const Complex Wt = (next.W[i] - prev.W[i]) / two_dt;
                Complex lhs = Wt + I * k * sh.us[i] * cur.W[i] - Wyy[i] + eps * eps * k * k * cur.W[i];
                Complex rhs;
                const double g2 = sh.d2us[i], g3 = sh.d3us[i];
                switch (which) {
                    case Transformed::w1bar:
                        rhs = -cuts.d2psi1[i] * cur.aux[i] - 2.0 * cuts.dpsi1[i] * w1y[i] + cuts.psi1[i] * F1y[i];
                        break;
                    case Transformed::w2bar: {
                        const Complex F2 = 2.0 * g3 * uy[i] - 2.0 * g2 * uyy[i];
                        rhs = -cuts.d2psi2[i] * cur.aux[i] - 2.0 * cuts.dpsi2[i] * aux_y[i] + cuts.psi2[i] * F2;
                        break;
                    }
                    case Transformed::h: {
                        const double phi = cuts.phi3[i], dphi = cuts.dphi3[i], d2phi = cuts.d2phi3[i];
                        if (phi <= 0.0) break;
                        const double s12 = std::sqrt(g2);
                        const double dt_minus_lap = g3 * dphi / (g2 * s12) - d2phi / s12 -
                                                    0.75 * g3 * g3 * phi / (g2 * g2 * s12);
                        const double dd = dphi / s12 - 0.5 * phi * g3 / (g2 * s12);
                        lhs += d[i] * v[i] * g2;
                        rhs = dt_minus_lap * uy[i] - 2.0 * dd * uyy[i];
                        break;
                    }
                    case Transformed::h1: {
                        lhs += I * k * cur.aux[i];
                        const double g4 = sh.d4us[i];
                        const double rt = (d5[i] * g2 - g3 * g4) / (g2 * g2);
                        rhs = -rt * uy[i] + d2r[i] * uy[i] + 2.0 * dr[i] * uyy[i];
                        break;
                    }
                }
                res[i] = lhs - rhs;
            }
            const double norm = l2_norm(g, res);
            per_mode.push_back(norm);
            r.max = std::max(r.max, norm);
        }
        r.times.push_back(traj.states[s].t);
        r.norms.push_back(std::move(per_mode));
    }
    return r;
}

ShadowReport shadow_constants(const Grid& g, const GoodUnknowns& gu, const ShearState& shear, const CutoffSet& cuts) {
    const std::size_t n = g.size();
    const double delta = cuts.delta;
    ShadowReport r;
    std::vector<bool> I1(n), I2(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double z = std::abs(g.y(i) - 1.0);
        I1[i] = z >= delta && z <= 2.0 * delta;
        I2[i] = z >= 2.0 * delta && z <= 3.0 * delta;
        const double p = shear.dus[i];
        if (I1[i]) r.C1_bound = std::max(r.C1_bound, 1.0 / (p * p));
        if (I2[i]) r.C2_bound = std::max(r.C2_bound, p * p * std::exp(0.5 * g.y(i)));
    }
    for (const auto& m : gu.modes) {
        CProfile a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = I1[i] ? m.w1[i] : Complex{};
            b[i] = I2[i] ? m.w2[i] : Complex{};
        }
        const double w2bar = l2_norm(g, m.w2bar), w1bar = l2_norm(g, m.w1bar);
        if (w2bar > 0.0) r.C1 = std::max(r.C1, l2_norm(g, a) / w2bar);
        if (w1bar > 0.0) r.C2 = std::max(r.C2, l2_norm(g, b) / w1bar);
    }
    return r;
}

}  // namespace prandtl
