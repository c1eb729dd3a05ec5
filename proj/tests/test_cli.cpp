#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "levywave/io.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = LEVYWAVE_CLI_PATH;
const std::string kTmp = LEVYWAVE_TEST_TMP;

int run(const std::string& args) {
    const std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string model_file() {
    fs::create_directories(kTmp);
    const std::string path = kTmp + "/bm.json";
    std::ofstream out(path);
    out << R"({"b": 0.0, "sigma": 1.0, "jump": {"rate": 0.0}, "center": true})";
    return path;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit with code 2") {
    CHECK(run("gamma") == 2);  // missing --seed and --model
    CHECK(run("nonsense --seed 1") == 2);
    CHECK(run("gamma --model /nonexistent.json --seed 1 --out " + kTmp) == 2);
}

TEST_CASE("gamma writes stamped tables with the closed-form values") {
    const std::string model = model_file();
    const std::string out = kTmp + "/gamma_run";
    fs::remove_all(out);
    CHECK(run("gamma --model " + model + " --seed 7 --out " + out +
              " --alphas 0.5,1,2 --gamma-inverse 1") == 0);

    const std::string csv = levywave::read_text_file(out + "/gamma.csv");
    CHECK(csv.find("# config_hash=") != std::string::npos);
    CHECK(csv.find("# seed=7") != std::string::npos);
    CHECK(csv.find("0.125") != std::string::npos);  // Gamma(0.5) = 0.125
    CHECK(csv.find("0.5,0.125,0.125") != std::string::npos);

    const std::string inv = levywave::read_text_file(out + "/gamma_inverse.csv");
    CHECK(inv.find("1.4142135")  != std::string::npos);  // Gamma^{-1}(1)

    // refuses to overwrite without --force
    CHECK(run("gamma --model " + model + " --seed 7 --out " + out +
              " --alphas 0.5,1,2") == 2);
    CHECK(run("gamma --model " + model + " --seed 7 --out " + out +
              " --alphas 0.5,1,2 --force") == 0);
}

TEST_CASE("identical config and seed give byte-identical outputs") {
    const std::string model = model_file();
    const std::string out1 = kTmp + "/det1", out2 = kTmp + "/det2";
    fs::remove_all(out1);
    fs::remove_all(out2);
    const std::string args = " --model " + model +
                             " --seed 99 --c 1.0 --x0 1.0 --schedule 1,2"
                             " --n-paths 20000 --dt 0.05";
    CHECK(run("yaglom" + args + " --out " + out1) == 0);
    CHECK(run("yaglom" + args + " --out " + out2 + " --threads 4") == 0);
    CHECK(levywave::read_text_file(out1 + "/yaglom_law.csv") ==
          levywave::read_text_file(out2 + "/yaglom_law.csv"));
    CHECK(levywave::read_text_file(out1 + "/yaglom_stages.csv") ==
          levywave::read_text_file(out2 + "/yaglom_stages.csv"));
}

TEST_CASE("qsd reports the non-existence regime cleanly with exit 0") {
    const std::string model = model_file();
    const std::string out = kTmp + "/qsd_noroot";
    fs::remove_all(out);
    CHECK(run("qsd --model " + model + " --seed 3 --out " + out +
              " --c 1.0 --r 0.9 --n-paths 10") == 0);
    const std::string summary =
        levywave::read_text_file(out + "/qsd_summary.json");
    CHECK(summary.find("non-existence") != std::string::npos);
    CHECK(summary.find("config_hash") != std::string::npos);
}

TEST_CASE("front subcommand produces a trace and a sane speed") {
    const std::string model = model_file();
    const std::string out = kTmp + "/front_run";
    fs::remove_all(out);
    CHECK(run("front --model " + model + " --seed 5 --out " + out +
              " --r 1.0 --lo -30 --hi 60 --dx 0.1 --T 10") == 0);
    const std::string summary =
        levywave::read_text_file(out + "/front_summary.json");
    CHECK(summary.find("\"speed\"") != std::string::npos);
    CHECK(levywave::read_text_file(out + "/front_trace.csv").find("front_position") !=
          std::string::npos);
}

} // TEST_SUITE
