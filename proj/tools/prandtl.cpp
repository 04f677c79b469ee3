#include <CLI11.hpp>

#include "prandtl/config.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Linearized Prandtl simulator and Gevrey energy verifier"};
    app.require_subcommand(1, 1);
    std::string config;
    std::optional<std::string> out;
    int threads = 1;
    for (const char* name : {"shear", "evolve", "verify", "instability"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config, "key=value run configuration")->required();
        sub->add_option("--out", out, "output directory, overrides output.dir");
        sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    return prandtl::run(app.get_subcommands().front()->get_name(), config, out, threads);
}
