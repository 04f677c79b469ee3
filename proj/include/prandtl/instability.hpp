#pragma once

#include <string>
#include <vector>

#include "prandtl/gevrey.hpp"
#include "prandtl/linear_prandtl.hpp"
#include "prandtl/shear.hpp"

namespace prandtl {

struct ModeGrowth {
    int k = 0;
    double sigma = 0.0;     // least-squares slope of log ||u_k|| over the second half of [0, T]
    double r2_local = 0.0;  // quality of that fit
    bool reliable = true;   // false when the log-norm tail oscillates against the fitted trend
    std::vector<double> t, log_norm;
};

ModeGrowth mode_growth(const Grid& g, const ShearProfile& profile, int k, const CProfile& shape, double dt, double T,
                       double epsilon = 0.0);

// Independent single-mode runs, one task per wavenumber.
std::vector<ModeGrowth> growth_sweep(const Grid& g, const ShearProfile& profile, const std::vector<int>& ks,
                                     const CProfile& shape, double dt, double T, double epsilon = 0.0,
                                     int threads = 1);

struct GrowthFit {
    std::vector<int> ks;
    std::vector<double> sigmas;
    double slope = 0.0, intercept = 0.0, r2 = 0.0;  // log sigma = intercept + slope log k
    bool stable = false;      // fewer than two positive rates
    bool reproduced = false;  // r2 >= 0.9
};

// Regression over the positive rates only.
GrowthFit fit_sqrt_law(const std::vector<int>& ks, const std::vector<double>& sigmas);
GrowthFit fit_sqrt_law(const std::vector<ModeGrowth>& runs);

struct DampingReport {
    int k = 0;
    double lambda = 0.0;
    double horizon = 0.0;
    double gevrey_ratio = 0.0;   // max_t E(t) / E(0) with the Phi weight
    double sobolev_ratio = 0.0;  // max_t ||u_k(t)||^2_{H^{1/4,1}} / same at t = 0, no weight
};

// The same real datum shape cos(kx) in both runs. The horizon is T cut back to
// stay below 1/(2 lambda).
DampingReport damping_experiment(const Grid& g, const ShearProfile& profile, int k, const CProfile& shape,
                                 const GevreyParams& p, double delta, double dt, double T, int threads = 1);

// Largest multiple of dt not above T and strictly below 1/(2 lambda).
double admissible_horizon(double T, double lambda, double dt);

// lambda = 2 C_hat from a pre-run over T/4 (at least ten steps) with lambda = floor, never below floor.
double calibrate_lambda(const Grid& g, const ShearProfile& profile, const SolutionState& init, GevreyParams p,
                        double delta, double dt, double T, int threads = 1, double floor = 1.0);

void write_growth_csv(const std::string& path, const std::vector<ModeGrowth>& runs);
void write_growth_fit(const std::string& path, const GrowthFit& fit);

}  // namespace prandtl
