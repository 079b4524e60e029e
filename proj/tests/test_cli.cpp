#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "vpshell/io.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = VPSHELL_CLI_PATH;

struct RunOut {
    int exit_code;
    std::string stdout_text;
};

RunOut run(const std::string &args)
{
    const std::string out_path =
        (fs::temp_directory_path() / "vpshell_cli_out.txt").string();
    const std::string cmd = kCli + " " + args + " > " + out_path + " 2>&1";
    const int rc = std::system(cmd.c_str());
    std::ifstream in(out_path);
    std::stringstream ss;
    ss << in.rdbuf();
    return {WEXITSTATUS(rc), ss.str()};
}

std::string slurp(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("version flag")
{
    const RunOut r = run("--version");
    CHECK(r.exit_code == 0);
    CHECK(r.stdout_text.find("vpshell") != std::string::npos);
}

TEST_CASE("usage errors exit with 64")
{
    CHECK(run("").exit_code == 64);
    CHECK(run("scenario theorem1 --c1 32").exit_code == 64); // missing --c2
    CHECK(run("frobnicate").exit_code == 64);
    CHECK(run("check-bounds --r 1 --w -1").exit_code == 64);
}

TEST_CASE("check-bounds reports closed-form quantities")
{
    const RunOut r = run("check-bounds --r 1 --w -1 --l 1 --mass 0");
    REQUIRE(r.exit_code == 0);
    const nlohmann::json j = nlohmann::json::parse(r.stdout_text);
    CHECK(j["quantities"]["D"].get<double>() == doctest::Approx(1.0));
    CHECK(j["quantities"]["R_minus"].get<double>() == doctest::Approx(0.70710678).epsilon(1e-7));
    CHECK(j["quantities"]["T0_upper"].get<double>() == doctest::Approx(1.7320508).epsilon(1e-7));
    CHECK(j["detected_T0"].get<double>() == doctest::Approx(0.8660254).epsilon(1e-6));
    CHECK(j["check"]["all_pass"].get<bool>());
}

TEST_CASE("check-bounds rejects inbound preconditions")
{
    CHECK(run("check-bounds --r 1 --w 1 --l 1 --mass 0").exit_code == 2);
    CHECK(run("check-bounds --r -1 --w -1 --l 1 --mass 0").exit_code == 2);
    CHECK(run("check-bounds --r 1 --w -1 --l 1 --mass 1 --mu 2").exit_code == 2);
}

TEST_CASE("check-bounds with zero angular momentum reports the origin crossing")
{
    const RunOut r = run("check-bounds --r 1 --w -1 --l 0 --mass 0");
    REQUIRE(r.exit_code == 0);
    const nlohmann::json j = nlohmann::json::parse(r.stdout_text);
    CHECK(j["quantities"]["T0_upper"] == "unbounded");
    CHECK(j["detected_T0"].is_null());
    CHECK(j["origin_crossing_time"].get<double>() ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-4));
}

TEST_CASE("simulate rejects malformed input")
{
    const std::string bad = (fs::temp_directory_path() / "vpshell_bad_in.csv").string();
    std::ofstream(bad) << "index,R,W,L,weight\n0,-1,0,0,1\n";
    CHECK(run("simulate --input " + bad + " --t-end 1").exit_code == 65);
    CHECK(run("simulate --input /nonexistent.csv --t-end 1").exit_code == 65);
}

TEST_CASE("simulate runs an ensemble from CSV")
{
    const fs::path dir = fs::temp_directory_path() / "vpshell_sim_out";
    fs::remove_all(dir);
    const std::string in_csv = (fs::temp_directory_path() / "vpshell_sim_in.csv").string();
    std::ofstream(in_csv) << "index,R,W,L,weight\n"
                             "0,1,-0.5,0.2,0.125\n"
                             "1,2,-0.25,0.4,0.25\n";
    const RunOut r =
        run("simulate --input " + in_csv + " --t-end 0.5 --out " + dir.string());
    CHECK(r.exit_code == 0);
    CHECK(fs::exists(dir / "series.csv"));
    CHECK(fs::exists(dir / "final.csv"));
    const vpshell::Ensemble final_e = vpshell::read_ensemble_csv((dir / "final.csv").string());
    REQUIRE(final_e.size() == 2);
    CHECK(final_e.particles[0].R < 1.0); // inbound
    CHECK(final_e.particles[0].L == 0.2);
    // the comment line carries the tool version, not the thread count
    const std::string series = slurp((dir / "series.csv").string());
    CHECK(series.rfind("# vpshell", 0) == 0);
    CHECK(series.find("thread") == std::string::npos);
}

TEST_CASE("scenario run writes the full report bundle")
{
    const fs::path dir = fs::temp_directory_path() / "vpshell_scen_out";
    fs::remove_all(dir);
    const RunOut r = run("scenario theorem1 --c1 32 --c2 500 --epsilon 0.05 "
                         "--nr 8 --nw 16 --nl 8 --out " + dir.string());
    // the C2 = 500 target is out of reach at this epsilon, so checks fail
    CHECK(r.exit_code == 1);
    CHECK(r.stdout_text.find("FAIL certified_density_reaches_C2") != std::string::npos);
    CHECK(r.stdout_text.find("PASS max_radius_at_T") != std::string::npos);
    REQUIRE(fs::exists(dir / "report.json"));
    CHECK(fs::exists(dir / "series.csv"));
    CHECK(fs::exists(dir / "initial.csv"));
    const nlohmann::json rep = nlohmann::json::parse(slurp((dir / "report.json").string()));
    CHECK(rep["inputs"]["kind"] == "theorem1");
    CHECK(rep["resolved_parameters"]["a0"].get<double>() == doctest::Approx(1.0));
    CHECK_FALSE(rep["summary"]["all_pass"].get<bool>());
}

TEST_CASE("scenario planner failure exits with 2")
{
    const RunOut r = run("scenario theorem1 --c1 32 --c2 1e9");
    CHECK(r.exit_code == 2);
}

TEST_CASE("config file supplies defaults that flags override")
{
    const std::string cfg = (fs::temp_directory_path() / "vpshell_cfg.ini").string();
    std::ofstream(cfg) << "[scenario.theorem1]\nc1=32\nc2=500\nepsilon=0.05\nnr=8\nnw=16\nnl=8\n";
    const fs::path dir = fs::temp_directory_path() / "vpshell_cfg_out";
    fs::remove_all(dir);
    // the config flag is a top-level option and precedes the subcommand
    const RunOut r = run("--config " + cfg + " scenario theorem1 --out " + dir.string());
    CHECK(r.exit_code == 1); // same run as above, resolved from the file
    const std::string series = slurp((dir / "series.csv").string());
    CHECK(series.find("grid=8x16x8") != std::string::npos);
}
