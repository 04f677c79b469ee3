#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "prandtl/config.hpp"
#include "prandtl/error.hpp"

using namespace prandtl;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("prandtl_unit_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config parsing") {
    const RunConfig d = parse_config("");
    CHECK(d.ny == 1024);
    CHECK_FALSE(d.lambda.has_value());
    const RunConfig c = parse_config("# comment\ngrid.ny = 64  # trailing\ngevrey.lambda = 2.5\ninstability.ks = 1, 2,3\n");
    CHECK(c.ny == 64);
    CHECK(*c.lambda == 2.5);
    CHECK(c.instability_ks == std::vector<int>{1, 2, 3});
    CHECK_THROWS_AS(parse_config("grid.nx = 4\n"), ValidationError);
    CHECK_THROWS_AS(parse_config("grid.ny = 4\n"), ValidationError);
    CHECK_THROWS_AS(parse_config("time.dt = fast\n"), ValidationError);
    CHECK_THROWS_AS(parse_config("cutoff.delta = 0.2\n"), ValidationError);
    CHECK_THROWS_AS(parse_config("just words\n"), ValidationError);
}

TEST_CASE("exit codes") {
    const fs::path dir = scratch("exit");
    CHECK(run("shear", (dir / "missing.cfg").string(), (dir / "out").string(), 1) == 1);
    std::ofstream(dir / "bad.cfg") << "grid.nx = 5\n";
    CHECK(run("shear", (dir / "bad.cfg").string(), (dir / "out").string(), 1) == 2);
    std::ofstream(dir / "erf.cfg") << "profile.kind = erf\ngrid.ny = 256\ntime.T = 0.05\n";
    CHECK(run("shear", (dir / "erf.cfg").string(), (dir / "out").string(), 1) == 2);
    std::ofstream(dir / "ok.cfg") << "grid.ny = 256\ntime.T = 0.05\n";
    CHECK(run("shear", (dir / "ok.cfg").string(), (dir / "out").string(), 1) == 0);
    CHECK(fs::exists(dir / "out" / "shear_trace.csv"));
    CHECK(run("nonsense", (dir / "ok.cfg").string(), (dir / "out").string(), 1) == 2);
    fs::remove_all(dir);
}

TEST_CASE("verify on zero data is vacuous") {
    const fs::path dir = scratch("zero");
    std::ofstream(dir / "z.cfg") << "grid.L = 15\ngrid.ny = 256\ntime.T = 0.02\nmodes.kmax = 2\ninit.amplitude = 0\n";
    CHECK(run("verify", (dir / "z.cfg").string(), (dir / "out").string(), 1) == 0);
    const std::string c = slurp(dir / "out" / "constants.txt");
    CHECK(c.find("master vacuous") != std::string::npos);
    CHECK(c.find("recovery vacuous") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("evolve output is independent of the thread count") {
    const fs::path dir = scratch("threads");
    std::ofstream(dir / "e.cfg") << "grid.L = 15\ngrid.ny = 256\ntime.T = 0.02\nmodes.kmax = 4\ngevrey.lambda = 1\n";
    CHECK(run("evolve", (dir / "e.cfg").string(), (dir / "a").string(), 1) == 0);
    CHECK(run("evolve", (dir / "e.cfg").string(), (dir / "b").string(), 3) == 0);
    CHECK(slurp(dir / "a" / "energy_trace.csv") == slurp(dir / "b" / "energy_trace.csv"));
    CHECK(slurp(dir / "a" / "energy_trace.csv").rfind("t,E,D,G,dEdt,margin\n", 0) == 0);
    fs::remove_all(dir);
}
