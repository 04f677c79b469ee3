#pragma once

#include <map>
#include <string>
#include <vector>

#include "prandtl/grid.hpp"
#include "prandtl/linear_prandtl.hpp"
#include "prandtl/unknowns.hpp"

namespace prandtl {

struct GevreyParams {
    double theta = 0.05;
    double theta1 = 0.2;
    double lambda = 1.0;
    double T = 0.25;
    bool check_theta1 = true;  // enforce theta < 1/8 and (1 - 8 theta)(1 + theta1) < 1
};

// Throws ValidationError on any violated invariant, including exponent overflow at kmax.
void validate(const GevreyParams& p, int kmax);

// Phi(t, k) = (1 - lambda t) <k>^{1/2 + 2 theta}.
double gevrey_phi(const GevreyParams& p, double t, int k);
SolutionState gevrey_apply(const SolutionState& s, const GevreyParams& p, double t);

enum class Weight { one, exp_half };  // mu = 1 or e^{y/2}

// sum_{alpha <= floor(s)} (k^2)^alpha (1 + k^2)^{s - floor(s)}
double horizontal_weight(int k, double s);

// Mode indices by ascending |k|, then negative before positive. Every reduction
// over modes uses this order so that results do not depend on thread count.
std::vector<std::size_t> summation_order(const std::vector<ModeField>& modes);

// 2 pi sum_k horizontal_weight(k, s) sum_{beta <= ell} int mu^2 |d_y^beta u_k|^2 dy.
double norm_Hsl(const Grid& g, const std::vector<ModeField>& modes, double s, int ell, Weight mu = Weight::one);
double norm_Hsl(const Grid& g, const SolutionState& s, double order, int ell, Weight mu = Weight::one);

// Per-mode integrals of one Phi-weighted field, kept in summation order.
struct FieldIntegrals {
    std::vector<int> k;
    std::vector<double> value;  // int |f|^2
    std::vector<double> slope;  // int |d_y f|^2
};

// Everything the energy functionals need at one time level. Norms are squared.
struct EnergySample {
    double t = 0.0;
    double E = 0.0, D = 0.0, G = 0.0;
    // Fields: w1bar, w2bar, w2phi (w2 varphi^{(1+theta1)/2}), h, h1bar (phi3 h1), u, u_mu.
    // For w2phi the slope entry holds varphi^{(1+theta1)/2} d_y w2.
    std::map<std::string, FieldIntegrals> fields;

    double norm(const std::string& field, double s) const;   // H^{s,0}
    double dnorm(const std::string& field, double s) const;  // d_y part in H^{s,0}
};

EnergySample energy_sample(const Grid& g, const SolutionState& u, const ShearState& shear, const CutoffSet& cuts,
                           const GevreyParams& p, int threads = 1);

// Samples every stored state of the trajectory.
std::vector<EnergySample> energy_suite(const Grid& g, const Trajectory& traj, const GevreyParams& p, double delta,
                                       double c = 0.125, int threads = 1);

// Below this E the ratio fits treat a sample as vacuous.
inline constexpr double kEnergyFloor = 1e-30;

struct MasterReport {
    bool vacuous = true;
    double C_hat = 0.0;  // max of (dE/dt + lambda G + D) / E
    std::vector<double> dEdt, margin;  // margin = C_hat E - (dE/dt + lambda G + D)
    double gronwall_ratio = 0.0;    // max E(t) / (E(0) e^{C_hat t})
    double integrated_ratio = 0.0;  // same with lambda int G + int D added on the left
    bool gronwall_holds = true;
};

// Centered differences in the interior, one-sided at the ends; only interior samples enter the fit.
MasterReport verify_master_inequality(const std::vector<EnergySample>& samples, const GevreyParams& p);

struct InequalityFit {
    std::string name;
    double C = 0.0;      // smallest constant over the run
    double delta2 = 0.0;
    bool vacuous = true;
    bool degenerate = false;  // right side zero where the left side is positive
};

// Each fit is d/dt N + lambda G_N + D_N - delta2 D_extra <= C (R + G_N) where the
// estimate carries (lambda - C), and <= C R where it carries lambda alone.
std::vector<InequalityFit> verify_component_inequalities(const std::vector<EnergySample>& samples,
                                                         const GevreyParams& p, bool include_h1 = false);

struct IdentityReport {
    double divergence = 0.0, divergence_scale = 0.0;  // |Re sum int v conj(u_y)| and sum ||v|| ||u_y||
    double localized_lhs = 0.0, localized_rhs = 0.0, localized_scale = 0.0;
    double weight_residual = 0.0, weight_scale = 0.0;  // L2 on supp phi3 of d_t d - d_yy d minus its closed form
};

// Uses the stored step and, for the d_t d check, its two neighbours.
IdentityReport check_identities(const Grid& g, const Trajectory& traj, std::size_t step, const GevreyParams& p,
                                double delta, double c = 0.125);

struct RecoveryFit {
    double C = 0.0;
    bool vacuous = true;
    bool degenerate = false;
};

// ||u||_{H^{1/4+theta,1}_mu} <= C (||w1bar||_{H^{1/2,0}} + ||h||_{H^{1/4+theta,0}}), unsquared norms.
RecoveryFit check_recovery(const std::vector<EnergySample>& samples, const GevreyParams& p);

void write_energy_trace(const std::string& path, const std::vector<EnergySample>& samples, const MasterReport& m);

}  // namespace prandtl
