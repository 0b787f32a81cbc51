#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "locallaw/experiment.hpp"
#include "locallaw/kernels.hpp"
#include "locallaw/report.hpp"

namespace {

struct Common {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "Experiment config (INI)")->required();
    cmd->add_option("--out", c.out, "Output directory (overrides [output] dir)");
    cmd->add_option("--seed", c.seed, "Master seed (overrides [experiment] seed)");
    cmd->add_option("--threads", c.threads, "Worker threads (overrides LOCALLAW_THREADS)");
}

std::optional<std::size_t> env_threads() {
    const char* v = std::getenv("LOCALLAW_THREADS");
    if (!v || !*v) return std::nullopt;
    try {
        return static_cast<std::size_t>(std::stoul(v));
    } catch (const std::exception&) {
        std::cerr << "ignoring invalid LOCALLAW_THREADS='" << v << "'\n";
        return std::nullopt;
    }
}

locallaw::ExperimentConfig resolve(const Common& c) {
    auto config = locallaw::load_config(c.config);
    if (!c.out.empty()) config.output_dir = c.out;
    if (c.seed) config.set_seed(*c.seed);
    if (auto t = env_threads()) config.set_threads(*t);
    if (c.threads) config.set_threads(*c.threads);
    return config;
}

int finish(const locallaw::RunResult& result) {
    std::cout << result.summary;
    for (const auto& f : result.files) std::cout << "wrote " << f.string() << "\n";
    return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical checks of the local semicircle law for imprimitive variance profiles"};
    app.set_version_flag("--version", std::string(locallaw::version()));
    app.require_subcommand(1);

    Common check_opts, decompose_opts, verify_opts;
    std::string suite = "all";

    auto* check = app.add_subcommand("check-profile", "Validate the profile assumptions");
    add_common(check, check_opts);
    auto* decomp = app.add_subcommand("decompose", "Block decomposition and spectral certificate");
    add_common(decomp, decompose_opts);
    auto* verify = app.add_subcommand("verify", "Run verification suites");
    add_common(verify, verify_opts);
    std::vector<std::string> choices = locallaw::suite_names();
    choices.push_back("all");
    verify->add_option("--suite", suite, "Suite to run")->check(CLI::IsMember(choices));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : locallaw::kExitInfra;
    }

    try {
        if (*check) return finish(locallaw::run_check_profile(resolve(check_opts)));
        if (*decomp) return finish(locallaw::run_decompose(resolve(decompose_opts)));
        if (*verify) {
            const auto config = resolve(verify_opts);
            std::cout << "simd: " << locallaw::kernels::isa_name(locallaw::kernels::active_isa()) << ", config " << config.hash()
                      << "\n";
            return finish(locallaw::run_verify(config, suite));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return locallaw::kExitInfra;
    }
    return locallaw::kExitInfra;
}
