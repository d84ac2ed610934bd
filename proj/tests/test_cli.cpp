#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "doctest.h"
#include "fbpm/commands.hpp"
#include "oracles.hpp"

using namespace fbpm;

namespace {

const char* const kSmall = R"(problem.input = signal
problem.signal = sine
problem.n = 48
problem.amplitude = 1
problem.noise = 0.05
problem.seed = 3
problem.delta = 0.001
exponent.kind = constant
exponent.p = 3
rothe.T = 0.5
rothe.epsilon = 0.1
rothe.m = 6
)";

std::string message_of(const std::string& text)
{
    try {
        const Config cfg = Config::parse(text);
        cfg.reject_unknown(known_config_keys());
        cmd_run(cfg);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

int run_cli(const std::string& args)
{
    const std::string cmd = std::string(FBPM_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::filesystem::path scratch(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / ("fbpm_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("config text parsing")
{
    const Config c = Config::parse("# header\nrothe.T = 2 # trailing\n\nsweep.eps = 0.1, 0.05\n");
    CHECK(c.require_double("rothe.T") == 2.0);
    CHECK(c.require_double_list("sweep.eps") == std::vector<double>{0.1, 0.05});
    CHECK_THROWS_AS(Config::parse("rothe.T 2\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("nodot = 2\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("a.b.c = 2\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("a.b =\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("a.b = 1\na.b = 2\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("a.b = x\n").require_double("a.b"), ConfigError);
    CHECK_THROWS_AS(Config::parse("a.b = -1\n").require_uint("a.b"), ConfigError);
    CHECK_THROWS_AS(Config::parse("a.b = yes\n").get_bool("a.b", false), ConfigError);
}

TEST_CASE("config errors name the offending key")
{
    CHECK(message_of("problem.input = signal\n").find("problem.delta") != std::string::npos);
    CHECK(message_of(std::string(kSmall) + "rothe.bogus = 1\n").find("rothe.bogus") != std::string::npos);
    std::string image = kSmall;
    image.replace(image.find("input = signal"), 14, "input = image");
    CHECK(message_of(image).find("problem.image") != std::string::npos);
    CHECK(message_of(image + "problem.image = /nonexistent/x.pgm\n").find("/nonexistent/x.pgm") != std::string::npos);
    std::string bad_delta = kSmall;
    bad_delta.replace(bad_delta.find("0.001"), 5, "2");
    CHECK(message_of(bad_delta).find("delta") != std::string::npos);
    CHECK(message_of(kSmall).empty());
}

TEST_CASE("run artifacts and determinism")
{
    const Config cfg = Config::parse(kSmall);
    const CommandResult a = cmd_run(cfg);
    const CommandResult b = cmd_run(cfg);
    CHECK(a.exit_code == kExitOk);
    CHECK(a.files == b.files);
    REQUIRE(a.files.count("final.csv") == 1);
    REQUIRE(a.files.count("energy.csv") == 1);
    REQUIRE(a.files.count("summary.txt") == 1);
    const auto rows = oracle::csv_numbers(a.files.at("final.csv"));
    CHECK(rows.size() == 48);
    CHECK(oracle::csv_numbers(a.files.at("energy.csv")).size() == 7);
    CHECK(a.files.at("summary.txt").find("status=ok") != std::string::npos);
}

TEST_CASE("a single-epsilon sweep writes the same run artifacts")
{
    Config run = Config::parse(kSmall);
    Config sw = Config::parse(kSmall);
    sw.set("sweep.eps", "0.1");
    sw.set("sweep.m", "6");
    const CommandResult r = cmd_run(run);
    const CommandResult s = cmd_sweep(sw);
    CHECK(s.exit_code == kExitOk);
    CHECK(s.files.at("eps_0/final.csv") == r.files.at("final.csv"));
    CHECK(s.files.at("eps_0/energy.csv") == r.files.at("energy.csv"));
}

TEST_CASE("four-epsilon sweep distances form a symmetric matrix with zero diagonal")
{
    Config sw = Config::parse(kSmall);
    sw.set("sweep.eps", "0.2, 0.1, 0.05, 0.025");
    sw.set("sweep.m", "6");
    const CommandResult s = cmd_sweep(sw);
    REQUIRE(s.exit_code == kExitOk);
    const auto d = oracle::csv_numbers(s.files.at("distances.csv"));
    REQUIRE(d.size() == 4);
    for (std::size_t a = 0; a < 4; ++a) {
        REQUIRE(d[a].size() == 5);
        CHECK(d[a][a + 1] == 0.0);
        for (std::size_t b = 0; b < 4; ++b) {
            CHECK(d[a][b + 1] == d[b][a + 1]);
        }
    }
    CHECK(s.files.count("windows.csv") == 1);
    CHECK(s.files.count("hist_7.csv") == 1);
    CHECK(cmd_sweep(sw).files == s.files);
}

TEST_CASE("command-line exit codes")
{
    const auto dir = scratch("cli");
    const auto cfg = dir / "small.cfg";
    std::ofstream(cfg) << kSmall;
    const auto bad = dir / "bad.cfg";
    std::ofstream(bad) << kSmall << "rothe.bogus = 1\n";
    const auto out = dir / "out";

    CHECK(run_cli("run --config " + cfg.string() + " --out " + out.string()) == 0);
    CHECK(std::filesystem::exists(out / "final.csv"));
    CHECK(std::filesystem::exists(out / "summary.txt"));
    CHECK(run_cli("run") == 2);
    CHECK(run_cli("bogus --config " + cfg.string()) == 2);
    CHECK(run_cli("run --config " + (dir / "missing.cfg").string()) == 2);
    CHECK(run_cli("run --config " + bad.string()) == 2);

    // One Newton iteration cannot converge a nonlinear step.
    const auto hard = dir / "hard.cfg";
    std::ofstream(hard) << kSmall << "rothe.newton_max_iter = 1\n";
    CHECK(run_cli("run --config " + hard.string() + " --out " + (dir / "hard").string()) == 1);
    std::ifstream summary(dir / "hard" / "summary.txt");
    std::stringstream text;
    text << summary.rdbuf();
    CHECK(text.str().find("status=failed") != std::string::npos);
    std::filesystem::remove_all(dir);
}
