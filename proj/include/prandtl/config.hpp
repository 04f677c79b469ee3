#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace prandtl {

struct RunConfig {
    double L = 30.0;
    int ny = 1024;
    double dt = 1e-3;
    double T = 0.25;
    std::string profile_kind = "canonical";  // canonical | erf | file
    std::string profile_path;
    double profile_t0 = 0.01;  // erf time offset
    double delta = 0.125;
    double theta = 0.05;
    double theta1 = 0.2;
    std::optional<double> lambda;  // empty means auto
    bool check_theta1 = true;
    int kmax = 16;
    double epsilon = 0.0;
    std::string init_kind = "bump";  // bump | file
    std::string init_path;
    double init_center = 1.0, init_width = 0.1, init_wall_width = 0.05, init_amplitude = 1.0;
    std::string init_decay = "gevrey";  // gevrey | sobolev
    bool verify_h1 = false;
    std::string output_dir = "out";
    int snapshot_every = 0;  // steps between snapshots, 0 for the final state only
    std::vector<int> instability_ks = {16, 32, 64, 128, 256};
    int probe_k = 128;
};

// key=value lines, '#' starts a comment. Unknown keys and malformed values throw ValidationError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);  // throws std::runtime_error if the file is missing

// Exit status per subcommand: 0 ok, 1 missing config, 2 validation failure, 3 numerical abort.
int run(const std::string& subcommand, const std::string& config_path, const std::optional<std::string>& out_dir,
        int threads);

}  // namespace prandtl
