#include "prandtl/config.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "prandtl/error.hpp"

namespace prandtl {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
    double x = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(x))
        throw ValidationError(fmt::format("{}: '{}' is not a finite number", key, v));
    return x;
}

int to_int(const std::string& key, const std::string& v) {
    int x = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size()) throw ValidationError(fmt::format("{}: '{}' is not an integer", key, v));
    return x;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ValidationError(fmt::format("{}: '{}' is not a boolean", key, v));
}

std::string one_of(const std::string& key, const std::string& v, std::initializer_list<const char*> allowed) {
    for (const char* a : allowed)
        if (v == a) return v;
    throw ValidationError(fmt::format("{}: unsupported value '{}'", key, v));
}

void require(bool ok, const std::string& what) {
    if (!ok) throw ValidationError(what);
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig c;
    using Setter = std::function<void(const std::string&, const std::string&)>;
    const std::map<std::string, Setter> keys = {
        {"grid.L", [&](auto& k, auto& v) { c.L = to_double(k, v); }},
        {"grid.ny", [&](auto& k, auto& v) { c.ny = to_int(k, v); }},
        {"time.dt", [&](auto& k, auto& v) { c.dt = to_double(k, v); }},
        {"time.T", [&](auto& k, auto& v) { c.T = to_double(k, v); }},
        {"profile.kind", [&](auto& k, auto& v) { c.profile_kind = one_of(k, v, {"canonical", "erf", "file"}); }},
        {"profile.path", [&](auto&, auto& v) { c.profile_path = v; }},
        {"profile.t0", [&](auto& k, auto& v) { c.profile_t0 = to_double(k, v); }},
        {"cutoff.delta", [&](auto& k, auto& v) { c.delta = to_double(k, v); }},
        {"gevrey.theta", [&](auto& k, auto& v) { c.theta = to_double(k, v); }},
        {"gevrey.theta1", [&](auto& k, auto& v) { c.theta1 = to_double(k, v); }},
        {"gevrey.lambda",
         [&](auto& k, auto& v) {
             if (v == "auto") c.lambda.reset();
             else c.lambda = to_double(k, v);
         }},
        {"gevrey.check_theta1", [&](auto& k, auto& v) { c.check_theta1 = to_bool(k, v); }},
        {"modes.kmax", [&](auto& k, auto& v) { c.kmax = to_int(k, v); }},
        {"regularization.epsilon", [&](auto& k, auto& v) { c.epsilon = to_double(k, v); }},
        {"init.kind", [&](auto& k, auto& v) { c.init_kind = one_of(k, v, {"bump", "file"}); }},
        {"init.path", [&](auto&, auto& v) { c.init_path = v; }},
        {"init.center", [&](auto& k, auto& v) { c.init_center = to_double(k, v); }},
        {"init.width", [&](auto& k, auto& v) { c.init_width = to_double(k, v); }},
        {"init.wall_width", [&](auto& k, auto& v) { c.init_wall_width = to_double(k, v); }},
        {"init.amplitude", [&](auto& k, auto& v) { c.init_amplitude = to_double(k, v); }},
        {"init.decay", [&](auto& k, auto& v) { c.init_decay = one_of(k, v, {"gevrey", "sobolev"}); }},
        {"verify.h1", [&](auto& k, auto& v) { c.verify_h1 = to_bool(k, v); }},
        {"output.dir", [&](auto&, auto& v) { c.output_dir = v; }},
        {"output.snapshot_every", [&](auto& k, auto& v) { c.snapshot_every = to_int(k, v); }},
        {"instability.ks",
         [&](auto& k, auto& v) {
             c.instability_ks.clear();
             std::stringstream ss(v);
             std::string item;
             while (std::getline(ss, item, ',')) c.instability_ks.push_back(to_int(k, trim(item)));
         }},
        {"instability.probe_k", [&](auto& k, auto& v) { c.probe_k = to_int(k, v); }},
    };

    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ValidationError(fmt::format("line {}: expected key=value", number));
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        const auto it = keys.find(key);
        if (it == keys.end()) throw ValidationError(fmt::format("line {}: unknown key '{}'", number, key));
        it->second(key, value);
    }

    require(c.L > 0.0, "grid.L must be positive");
    require(c.ny >= 5, "grid.ny must be at least 5");
    require(c.dt > 0.0, "time.dt must be positive");
    require(c.T > 0.0, "time.T must be positive");
    require(c.profile_t0 > 0.0, "profile.t0 must be positive");
    require(c.delta > 0.0 && c.delta <= 0.125, "cutoff.delta must lie in (0, 1/8]");
    require(c.kmax >= 0, "modes.kmax must be nonnegative");
    require(c.epsilon >= 0.0, "regularization.epsilon must be nonnegative");
    require(c.init_width > 0.0 && c.init_wall_width > 0.0, "init widths must be positive");
    require(c.snapshot_every >= 0, "output.snapshot_every must be nonnegative");
    require(!c.lambda || *c.lambda > 0.0, "gevrey.lambda must be positive or auto");
    require(c.profile_kind != "file" || !c.profile_path.empty(), "profile.kind=file needs profile.path");
    require(c.init_kind != "file" || !c.init_path.empty(), "init.kind=file needs init.path");
    for (int k : c.instability_ks) require(k > 0, "instability.ks must be positive");
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace prandtl
