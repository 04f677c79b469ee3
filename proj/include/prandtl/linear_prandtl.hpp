#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "prandtl/grid.hpp"
#include "prandtl/shear.hpp"

namespace prandtl {

using Complex = std::complex<double>;

struct ModeField {
    int k = 0;
    CProfile values;
};

struct SolutionState {
    double t = 0.0;
    std::vector<ModeField> modes;
    double epsilon = 0.0;

    const ModeField* find(int k) const;
};

// v = -ik * int_0^y u.
CProfile compute_v(const Grid& g, const ModeField& m);

// One IMEX step of the linearized equation for every mode. Diffusion, the
// eps^2 k^2 damping and the transport term are implicit; the v coupling is explicit.
// Sets *cfl_warning when |k| max|us| dt > 1 for some mode.
SolutionState step(const Grid& g, const SolutionState& state, const ShearState& shear, double dt, int threads = 1,
                   bool* cfl_warning = nullptr);

struct EvolveOptions {
    std::size_t stride = 1;  // keep every stride-th state
    int threads = 1;
    bool keep_states = true;
    double horizon_limit = 0.0;  // if positive, T beyond it is rejected (min(T1, T2))
    // Called at every step, including t = 0, with the state and the shear at that time.
    std::function<void(const SolutionState&, const ShearState&)> observer;
};

struct Trajectory {
    double dt = 0.0;
    std::vector<SolutionState> states;
    std::vector<ShearState> shears;  // matching times
    bool cfl_warning = false;
};

Trajectory evolve(const Grid& g, const SolutionState& init, HeatSolver& shear, double dt, double T,
                  const EvolveOptions& opts = {});

// Nodes excluded at each end when residuals are measured. One-sided stencils at
// the wall change the error expansion there, and the repeated derivative chain
// spreads that over a few cells.
inline constexpr std::size_t kResidualMargin = 8;

struct ResidualReport {
    std::vector<double> times;               // interior step times
    std::vector<std::vector<double>> norms;  // [step][mode] unweighted L2 residual
    double max = 0.0;
    double at(double t) const;  // combined (root sum of squares over modes) at the step nearest t
};

// Centered-time insertion of the stored trajectory into the equation, with
// fourth-order spatial operators. Needs consecutive stored steps.
ResidualReport residual_u(const Grid& g, const Trajectory& traj);

// Initial data.
struct BumpSpec {
    double center = 1.0;
    double width = 0.1;
    double wall_width = 0.05;  // the shape is multiplied by 1 - exp(-(y/wall_width)^2)
};
CProfile bump_shape(const Grid& g, const BumpSpec& b);
SolutionState single_mode_state(int k, CProfile shape, double epsilon = 0.0);
// Real data: modes -kmax..kmax with u(k) = u(-k) = amplitude(|k|)/2 * shape (k = 0 gets the full amplitude).
SolutionState real_state(int kmax, const CProfile& shape, const std::function<double(int)>& amplitude,
                         double epsilon = 0.0);

// Snapshot CSV: `y,re_k<k>,im_k<k>,...`, 17 significant digits.
std::string snapshot_filename(double t);
void write_snapshot(const std::string& path, const Grid& g, const SolutionState& s);
SolutionState read_snapshot(const std::string& path, std::vector<double>* ys = nullptr);

}  // namespace prandtl
