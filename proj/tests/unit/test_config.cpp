#include "ecowalker/config.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

using namespace ecowalker;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("ecowalker_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write(const fs::path& path, const std::string& text) {
    std::ofstream(path) << text;
}

ExperimentConfig parse(const std::string& text) { return apply_config(parse_toml(text)); }

}  // namespace

TEST_SUITE("config") {
    TEST_CASE("empty document keeps defaults") {
        const ExperimentConfig c = parse("");
        const ExperimentConfig d;
        CHECK(c.cpg.frequency == d.cpg.frequency);
        CHECK(c.gains.kp_hip_right == 30.0);
        CHECK(c.gains.kp_hip_left == 26.0);
        CHECK(c.sim.contact_kn == 2.0e4);
        CHECK(c.mode.name() == "akfi");
    }

    TEST_CASE("values of every kind") {
        const ExperimentConfig c = parse(R"(
# comment
[sim]
dt = 2.5e-4      # trailing comment
seed = 1_234
contacts_enabled = false

[experiment]
mode = "PKFI40"
output_dir = "runs/#1"

[robot]
segment_masses = [1.26, 0.21, 0.21, 0.147, 0.147, 0.063, 0.063,]
hip_limits = [-1.0, 1.2]
)");
        CHECK(c.sim.dt == 2.5e-4);
        CHECK(c.sim.seed == 1234);
        CHECK_FALSE(c.sim.contacts_enabled);
        CHECK(c.mode.name() == "pkfi40");
        CHECK(c.output_dir == "runs/#1");
        CHECK(c.robot.segment_masses[6] == 0.063);
        CHECK(c.robot.hip_limits.max == 1.2);
    }

    TEST_CASE("syntax errors carry the line") {
        auto message = [](const std::string& text) {
            try {
                parse_toml(text, "x.toml");
            } catch (const ConfigError& e) {
                return std::string(e.what());
            }
            return std::string();
        };
        CHECK(message("[sim]\ndt 1\n").rfind("x.toml:2:", 0) == 0);
        CHECK(message("[sim\n").rfind("x.toml:1:", 0) == 0);
        CHECK(message("[[runs]]\n").rfind("x.toml:1:", 0) == 0);
        CHECK(message("[sim]\ndt = 1\ndt = 2\n").rfind("x.toml:3:", 0) == 0);
        CHECK(message("a = \"open\n").rfind("x.toml:1:", 0) == 0);
        CHECK(message("a = [1, \"x\"]\n").rfind("x.toml:1:", 0) == 0);
        CHECK(message("a = nope\n").rfind("x.toml:1:", 0) == 0);
    }

    TEST_CASE("unknown, read-only and mistyped keys are rejected") {
        CHECK_THROWS_WITH_AS(parse("[sim]\ndtt = 1\n"), doctest::Contains("unknown key"), ConfigError);
        CHECK_THROWS_WITH_AS(parse("[analysis]\nrate_threshold = 2\n"), doctest::Contains("read-only"), ConfigError);
        CHECK_THROWS_AS(parse("[sim]\ndt = \"fast\"\n"), ConfigError);
        CHECK_THROWS_AS(parse("[sim]\nseed = 1.5\n"), ConfigError);
        CHECK_THROWS_AS(parse("[experiment]\nmode = \"walk\"\n"), ConfigError);
        CHECK_THROWS_AS(parse("dt = 1\n"), ConfigError);
        CHECK_THROWS_AS(parse("[include]\nother = \"a.toml\"\n"), ConfigError);
    }

    TEST_CASE("invalid parameters become config errors") {
        CHECK_THROWS_AS(parse("[sim]\ndt = -1\n"), ConfigError);
        CHECK_THROWS_AS(parse("[cpg]\nfrequency = 0\n"), ConfigError);
        CHECK_THROWS_AS(parse("[experiment]\ncpg_phase0 = 1.0\n"), ConfigError);
        CHECK_NOTHROW(parse("[experiment]\nduration = 0\n"));
    }

    TEST_CASE("robot file include") {
        const fs::path dir = scratch_dir("include");
        fs::create_directories(dir / "sub");
        write(dir / "sub" / "robot.toml", "k_sol = 2000.0\n[robot]\nr_gas = 0.011\n");
        write(dir / "exp.toml", "[include]\nrobot = \"sub/robot.toml\"\n[cpg]\nfrequency = 1.1\n");
        const ExperimentConfig c = load_experiment_config(dir / "exp.toml");
        CHECK(c.robot.k_sol == 2000.0);
        CHECK(c.robot.r_gas == 0.011);
        CHECK(c.cpg.frequency == 1.1);

        write(dir / "bad_robot.toml", "[sim]\ndt = 1e-3\n");
        CHECK_THROWS_AS(load_robot_params(dir / "bad_robot.toml"), ConfigError);
        CHECK_THROWS_AS(load_experiment_config(dir / "missing.toml"), ConfigError);
        fs::remove_all(dir);
    }

    TEST_CASE("shipped robot file matches the built-in parameters") {
        const RobotParams a = load_robot_params(ECOWALKER_CONFIG_DIR "/robot.toml");
        const RobotParams b;
        const Metadata ea = config_echo(ExperimentConfig{a}), eb = config_echo(ExperimentConfig{b});
        for (const auto& [k, v] : eb) {
            if (k.rfind("robot.", 0) == 0) CHECK_MESSAGE(ea.at(k) == v, k);
        }
        CHECK_NOTHROW(load_experiment_config(ECOWALKER_CONFIG_DIR "/experiment.toml"));
    }

    TEST_CASE("config directory lookup") {
        const fs::path dir = scratch_dir("lookup");
        write(dir / "experiment.toml", "");
        setenv("ECOWALKER_CONFIG_DIR", dir.c_str(), 1);
        CHECK(resolve_config_path("") == dir / "experiment.toml");
        CHECK(resolve_config_path("experiment.toml") == dir / "experiment.toml");
        CHECK(resolve_config_path("nothing.toml").empty());
        unsetenv("ECOWALKER_CONFIG_DIR");
        fs::remove_all(dir);
    }

    TEST_CASE("echo round-trips through the parser") {
        ExperimentConfig c = parse("[robot]\nk_gas = 1234.5\n[sim]\ncontact_dn = 250.125\n[cpg]\nhip_offset = 0.2\n");
        const Metadata echo = config_echo(c);
        CHECK(echo.at("robot.k_gas") == "1234.5");
        std::string text;
        std::string table;
        for (const auto& [key, value] : echo) {
            const auto dot = key.find('.');
            const std::string t = key.substr(0, dot);
            if (t == "analysis" && (key == "analysis.rate_threshold" || key == "analysis.to_window" ||
                                    key == "analysis.skf_before" || key == "analysis.skf_after")) {
                continue;
            }
            if (t != table) text += "[" + (table = t) + "]\n";
            text += key.substr(dot + 1) + " = " + value + "\n";
        }
        const ExperimentConfig back = parse(text);
        CHECK(config_echo(back) == echo);

        const RobotParams p = robot_params_from_metadata(echo);
        CHECK(p.k_gas == 1234.5);
    }
}
