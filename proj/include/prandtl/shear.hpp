#pragma once

#include <array>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "prandtl/grid.hpp"

namespace prandtl {

struct ShearParams {
    double c = 0.125;      // convexity floor on [1/2, 2]
    double delta = 0.125;  // monotonicity margin around the critical point
};

struct ShearProfile {
    std::string kind;
    Profile u0, du0, d2u0, d3u0;
    ShearParams params;
    // Closed form for derivative orders 0..3 at any y >= 0. Empty for imported data.
    std::function<double(double, int)> exact;

    // Value of the given derivative order anywhere in [0, inf), falling back to
    // interpolation (and a constant far field) when no closed form exists.
    double eval(const Grid& g, double y, int order) const;
};

ShearProfile canonical_profile(const Grid& g, double delta = 0.125);
ShearProfile erf_profile(const Grid& g, double t0 = 0.01, double delta = 0.125);
// Nodal samples of u0 on the grid; derivatives are taken numerically.
ShearProfile profile_from_samples(const Grid& g, Profile u0, ShearParams params, std::string kind = "file");
// Two-column CSV `y,u0` with a header line, interpolated onto the grid.
ShearProfile import_profile_csv(const Grid& g, const std::string& path, ShearParams params);

struct Clause {
    std::string name;
    bool pass = false;
    double margin = 0.0;
};

struct AssumptionReport {
    std::vector<Clause> clauses;
    double min_convexity = 0.0;     // min of d2u0 on [1/2, 2]
    double min_monotone_ratio = 0.0;  // min of |du0| e^y / (c delta) off [1-delta, 1+delta]
    double h3_norm_sq = 0.0;        // ||du0||^2 in H^3 with weight e^{y/2}
    bool all_pass() const;
    const Clause& clause(const std::string& name) const;
};

AssumptionReport validate_assumptions(const Grid& g, const ShearProfile& p);

struct ShearState {
    double t = 0.0;
    Profile us, dus, d2us, d3us, d4us;
    double a = std::numeric_limits<double>::quiet_NaN();  // NaN when there is no critical point
    double a_residual = 0.0;

    bool has_critical_point() const { return a == a; }
};

// Derivatives of us by repeated diff1, so that the y-derivative of dus is d2us
// on the nose and the good-unknown transforms annihilate the shear direction.
ShearState make_shear_state(const Grid& g, double t, Profile us);

// Newton refinement of dus(a) = 0 on the cubic interpolant, seeded at `seed`.
// Returns the root and the final residual; throws NumericalAbort on divergence.
std::pair<double, double> newton_critical_point(const Grid& g, const ShearState& s, double seed);

// Crank-Nicolson march for the heat equation, one step at a time.
class HeatSolver {
public:
    HeatSolver(const Grid& g, const ShearProfile& p, double dt);

    const ShearState& state() const { return state_; }
    double dt() const { return dt_; }
    void advance();

private:
    const Grid* grid_;
    double dt_;
    double boundary_value_;
    double lower_bound_, upper_bound_;
    ShearState state_;
};

// Stores every `stride`-th state (plus the final one).
std::vector<ShearState> heat_solve(const Grid& g, const ShearProfile& p, double dt, double T,
                                   std::size_t stride = 1);

// Image-kernel representation of the heat solution and its first three y-derivatives.
double heat_oracle(const Grid& g, const ShearProfile& p, double t, double y, int order = 0);

struct DecayReport {
    double sigma = 0.0;              // best exponent with |d^k(us - 1)| <= C e^{-sigma y}
    std::array<double, 4> C{};       // constants at that exponent
    bool unit_exponent_holds = false;
};

DecayReport check_decay(const Grid& g, std::span<const ShearState> states);

struct PersistenceResult {
    double T1 = 0.0;
    bool holds_at_start = false;
    double min_convexity = 0.0;   // over the window
    double min_monotone_ratio = 0.0;  // min |dus| e^y / ((c/2) delta) over the window
};

PersistenceResult persistence_window(const Grid& g, std::span<const ShearState> states, const ShearParams& p);

struct CriticalPointSample {
    double t, a, residual, a_direct;
};

struct CriticalPointTrack {
    std::vector<CriticalPointSample> samples;
    double T2 = 0.0;           // last sample time with |a - 1| <= 2 delta
    bool exceeded = false;
    double max_residual = 0.0;
    double max_disagreement = 0.0;  // predictor/Newton vs direct bracketing, up to T2
};

CriticalPointTrack track_critical_point(const Grid& g, std::span<const ShearState> states, const ShearParams& p);

struct ShearEnergy {
    std::vector<double> t, Es;
    double C = 0.0;  // fitted rate with Es(t) <= Es(0) e^{Ct}
};

ShearEnergy shear_energy(const Grid& g, std::span<const ShearState> states);

// min of d2us on [1/2, 2] and min of |dus| e^y / (c delta) off [1-delta, 1+delta].
double min_convexity(const Grid& g, const Profile& d2us);
double monotone_ratio(const Grid& g, const Profile& dus, const ShearParams& p);

void write_shear_trace(const std::string& path, const Grid& g, std::span<const ShearState> states,
                       const ShearEnergy& energy, const ShearParams& p);

}  // namespace prandtl
