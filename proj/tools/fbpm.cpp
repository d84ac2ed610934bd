// Command-line front end: fbpm run|sweep|verify --config PATH [--seed N] [--out DIR]

#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "fbpm/acceptance.hpp"
#include "fbpm/commands.hpp"

namespace {

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
};

void add_flags(CLI::App* sub, Flags& flags)
{
    sub->add_option("--config", flags.config, "config file (section.key = value lines)")->required();
    sub->add_option("--seed", flags.seed, "override the noise seed (run, sweep) or the sampling seed (verify)");
    sub->add_option("--out", flags.out, "output directory (overrides io.out)");
}

fbpm::Config load(const Flags& flags, const char* seed_key)
{
    fbpm::Config cfg = fbpm::Config::load(flags.config);
    cfg.reject_unknown(fbpm::known_config_keys());
    if (flags.seed) {
        cfg.set(seed_key, std::to_string(*flags.seed));
    }
    if (!flags.out.empty()) {
        cfg.set("io.out", flags.out);
    }
    return cfg;
}

int finish(const fbpm::CommandResult& result, const fbpm::Config& cfg)
{
    for (const auto& line : result.messages) {
        std::cout << line << '\n';
    }
    fbpm::write_artifacts(cfg.get_string("io.out", "."), result.files);
    return result.exit_code;
}

int verify(const fbpm::Config& cfg)
{
    fbpm::acceptance::Options options;
    options.seed = cfg.get_uint("verify.seed", options.seed);
    options.below_threshold = cfg.get_bool("verify.below_threshold", false);
    const auto results = fbpm::acceptance::run_all(options);
    std::ostringstream report;
    bool ok = true;
    for (const auto& r : results) {
        report << fbpm::acceptance::format(r) << '\n';
        ok = ok && r.status != fbpm::acceptance::Status::fail;
    }
    std::cout << report.str();
    if (cfg.has("io.out")) {
        fbpm::write_artifacts(cfg.get_string("io.out", "."), {{"verify.txt", report.str()}});
    }
    return ok ? fbpm::kExitOk : fbpm::kExitSolverFailure;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Forward-backward Perona-Malik solver with variable-exponent regularization"};
    app.require_subcommand(1);
    Flags run_flags;
    Flags sweep_flags;
    Flags verify_flags;
    CLI::App* run = app.add_subcommand("run", "evolve one configuration and write its artifacts");
    CLI::App* sweep = app.add_subcommand("sweep", "run a family of decreasing epsilon and compare them");
    CLI::App* check = app.add_subcommand("verify", "run the property and acceptance checks");
    add_flags(run, run_flags);
    add_flags(sweep, sweep_flags);
    add_flags(check, verify_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return fbpm::kExitUsage;
    }

    try {
        if (*run) {
            const fbpm::Config cfg = load(run_flags, "problem.seed");
            return finish(fbpm::cmd_run(cfg), cfg);
        }
        if (*sweep) {
            const fbpm::Config cfg = load(sweep_flags, "problem.seed");
            return finish(fbpm::cmd_sweep(cfg), cfg);
        }
        return verify(load(verify_flags, "verify.seed"));
    } catch (const fbpm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n' << app.help();
        return fbpm::kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return fbpm::kExitSolverFailure;
    }
}
