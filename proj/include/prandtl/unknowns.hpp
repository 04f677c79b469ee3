#pragma once

#include <string>
#include <vector>

#include "prandtl/grid.hpp"
#include "prandtl/linear_prandtl.hpp"
#include "prandtl/shear.hpp"

namespace prandtl {

// C4 smoothstep with s'(r) = 630 r^4 (1 - r)^4, 0 below y0 and 1 above y1.
struct Ramp {
    double value, d1, d2;
};
Ramp ramp_up(double y, double y0, double y1);

struct CutoffSet {
    double delta = 0.125;
    double a = 1.0;
    double c = 0.125;         // convexity floor, for the shear clause check
    double mollifier = 0.0;   // width in z^2 / (|z| + width)
    Profile phi1, psi1, psi2, phi3, varphi;
    Profile dpsi1, d2psi1, dpsi2, d2psi2, dphi3, d2phi3, dvarphi;

    double phi1_at(double y) const;
    double psi2_at(double y) const;
    double phi3_at(double y) const;
    double varphi_at(double y) const;
};

CutoffSet build_cutoffs(const Grid& g, double delta, double a, double c = 0.125);

struct ModeUnknowns {
    int k = 0;
    CProfile w1, w1bar, w2, w2bar, h, h1;
    Complex J{};
};

struct GoodUnknowns {
    Profile d;  // phi3 (d2us)^{-1/2}
    std::vector<ModeUnknowns> modes;
};

// Throws ValidationError when the shear fails the shear clauses or a division guard trips.
GoodUnknowns good_unknowns(const Grid& g, const SolutionState& u, const ShearState& shear, const CutoffSet& cuts,
                           int threads = 1);
ModeUnknowns mode_unknowns(const Grid& g, const ModeField& m, const ShearState& shear, const CutoffSet& cuts,
                           const Profile& d);
Profile weight_d(const ShearState& shear, const CutoffSet& cuts);

struct F1Result {
    CProfile F1;         // on supp psi1, zero elsewhere
    CProfile psi1_dF1;   // psi1 * dF1/dy by the product rule
    CProfile defining;   // u d_t(1/dus) - [d_y^2, 1/dus] u assembled directly
};
F1Result forcing_F1(const Grid& g, const ModeField& m, const ShearState& shear, const CutoffSet& cuts);

struct F2Result {
    CProfile reduced;    // -2 d2us u_yy + 2 d3us u_y
    CProfile defining;   // the commutator form, commutators evaluated numerically
    CProfile identity_lhs, identity_rhs;  // -u d4us - [d2us, d_y^2] u  vs  2 d3us u_y
};
F2Result forcing_F2(const Grid& g, const ModeField& m, const ShearState& shear);

struct ModeDecomposition {
    int k = 0;
    CProfile u1, u2;
    Complex J{};
    Complex du1_below{}, du1_above{};  // one-sided limits of d_y u1 at a
    double reconstruction_error = 0.0;  // max |u1 + u2 - u| / max |u| off the a-cell
};

struct Decomposition {
    std::size_t a_cell = 0;  // nodes a_cell and a_cell + 1 bracket a(t)
    double branch_mismatch = 0.0;
    std::vector<ModeDecomposition> modes;
};

// Branch integrals use the telescoping cell derivative of u/dus, the discrete
// counterpart of the w1 and w2bar/(dus)^2 integrands.
Decomposition decompose_u(const Grid& g, const SolutionState& u, const ShearState& shear, const CutoffSet& cuts);

enum class Transformed { w1bar, w2bar, h, h1 };
std::string to_string(Transformed which);

// Centered-time insertion of the unknowns computed from a stored trajectory.
ResidualReport residual_transformed(Transformed which, const Grid& g, const Trajectory& traj, double delta,
                                    double c = 0.125);

// Fitted constants for the two shadow dominations and the bounds the
// shear predicts for them.
struct ShadowReport {
    double C1 = 0.0, C1_bound = 0.0;  // ||1_{I1} w1|| <= C1 ||w2bar||
    double C2 = 0.0, C2_bound = 0.0;  // ||1_{I2} w2|| <= C2 ||w1bar||
};
ShadowReport shadow_constants(const Grid& g, const GoodUnknowns& gu, const ShearState& shear, const CutoffSet& cuts);

}  // namespace prandtl
