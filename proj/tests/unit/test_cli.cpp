#include <cmath>

#include "doctest.h"
#include "files.hpp"
#include "hhta/signal.hpp"
#include "hhta/stable.hpp"
#include "json.hpp"
#include "run.hpp"
#include "synthetic.hpp"

using namespace hhta;
using testing::TempDir;

namespace {

const std::string kCli = HHTA_CLI_PATH;

testing::RunResult run(const TempDir& dir, const std::string& args) {
    return testing::run_cli(kCli, args, dir / "stdout.txt");
}

std::string q(const std::filesystem::path& p) { return "\"" + p.string() + "\""; }

// Short noisy input and a fast configuration shared by the enhance cases.
void make_noisy(const TempDir& dir) {
    const auto clean = testing::speech_proxy(0.8, 16000, 12);
    const Signal noise(sample_sas(1.4, clean.size(), 3), 16000);
    write_wav(clean, dir / "clean.wav");
    write_wav(mix_at_snr(clean, noise, 0.0, 1), dir / "noisy.wav");
}

const std::string kFast = " --ensemble 4 --frame 4096 --step 256";

}  // namespace

TEST_CASE("enhance keeps length and rate and writes a profile") {
    TempDir dir;
    make_noisy(dir);
    const auto r = run(dir, "enhance --in " + q(dir / "noisy.wav") + " --out " + q(dir / "out.wav") + " --profile " +
                                q(dir / "p.csv") + kFast + " --seed 7");
    REQUIRE(r.exit_code == 0);
    const auto in = read_wav(dir / "noisy.wav");
    const auto out = read_wav(dir / "out.wav");
    CHECK(out.size() == in.size());
    CHECK(out.sample_rate() == in.sample_rate());
    const auto csv = testing::read_bytes(dir / "p.csv");
    CHECK(csv.starts_with("alpha_1,"));
    const auto rows = std::count(csv.begin(), csv.end(), '\n');
    CHECK(rows == 1 + static_cast<long>((in.size() + 255) / 256));
}

TEST_CASE("enhance with the same seed is byte-identical") {
    TempDir dir;
    make_noisy(dir);
    const std::string base = "enhance --in " + q(dir / "noisy.wav") + kFast + " --seed 7";
    REQUIRE(run(dir, base + " --out " + q(dir / "a.wav")).exit_code == 0);
    REQUIRE(run(dir, base + " --out " + q(dir / "b.wav")).exit_code == 0);
    CHECK(testing::read_bytes(dir / "a.wav") == testing::read_bytes(dir / "b.wav"));
}

TEST_CASE("published operating point flags are accepted") {
    TempDir dir;
    make_noisy(dir);
    const auto r = run(dir, "enhance --in " + q(dir / "noisy.wav") + " --out " + q(dir / "o.wav") +
                                " --mu 0.8 --alpha-min 1.1 --frame 10240 --step 128 --ensemble 2 --threshold-mode floor");
    CHECK(r.exit_code == 0);
}

TEST_CASE("bad flags are usage errors") {
    TempDir dir;
    make_noisy(dir);
    const std::string in = " --in " + q(dir / "noisy.wav") + " --out " + q(dir / "o.wav");
    CHECK(run(dir, "enhance" + in + " --threshold-mode max").exit_code != 0);
    CHECK(run(dir, "enhance" + in + " --frame 100 --step 200").exit_code != 0);
    CHECK(run(dir, "enhance --in " + q(dir / "missing.wav") + " --out " + q(dir / "o.wav")).exit_code != 0);
    CHECK(run(dir, "frobnicate").exit_code != 0);
}

TEST_CASE("decompose writes M modes plus residual that sum to the input") {
    TempDir dir;
    const Signal x(testing::white_noise(16000, 4), 16000);
    write_wav(x, dir / "x.wav");
    const auto r = run(dir, "decompose --in " + q(dir / "x.wav") + " --out " + q(dir / "d_") + " --ensemble 2");
    REQUIRE(r.exit_code == 0);
    std::vector<double> sum(x.size(), 0.0);
    int files = 0;
    for (int m = 1; m <= 10; ++m) {
        const auto name = std::string("d_IMF_") + (m < 10 ? "0" : "") + std::to_string(m) + ".wav";
        REQUIRE(std::filesystem::exists(dir / name));
        const auto mode = read_wav(dir / name);
        for (std::size_t i = 0; i < x.size(); ++i) sum[i] += mode[i];
        ++files;
    }
    const auto res = read_wav(dir / "d_residual.wav");
    for (std::size_t i = 0; i < x.size(); ++i) sum[i] += res[i];
    ++files;
    CHECK(files == 11);
    // Each file is float32, so the tolerance reflects 11 single-precision roundings.
    CHECK(testing::max_abs_diff(sum, x.samples()) < 1e-6 * x.peak());
}

TEST_CASE("decompose of a constant writes only a residual") {
    TempDir dir;
    write_wav(Signal(std::vector<double>(1000, 0.125), 16000), dir / "c.wav");
    REQUIRE(run(dir, "decompose --in " + q(dir / "c.wav") + " --out " + q(dir / "c_") + " --ensemble 1 --ensemble-snr inf")
                .exit_code == 0);
    CHECK_FALSE(std::filesystem::exists(dir / "c_IMF_01.wav"));
    CHECK(read_wav(dir / "c_residual.wav")[10] == 0.125);
}

TEST_CASE("synth-noise length and alpha") {
    TempDir dir;
    REQUIRE(run(dir, "synth-noise --alpha 2.0 --duration 2.4 --rate 16000 --seed 1 --out " + q(dir / "g.wav")).exit_code ==
            0);
    const auto g = read_wav(dir / "g.wav");
    CHECK(g.size() == 38400);
    CHECK(estimate_alpha(g.samples()).alpha >= 1.95);

    REQUIRE(run(dir, "synth-noise --alpha 1.2 --seed 2 --out " + q(dir / "i.wav")).exit_code == 0);
    const double a = estimate_alpha(read_wav(dir / "i.wav").samples()).alpha;
    CHECK(a >= 1.1);
    CHECK(a <= 1.3);
}

TEST_CASE("alpha subcommand prints json") {
    TempDir dir;
    write_wav(Signal(sample_sas(1.5, 20000, 4), 16000), dir / "n.wav");
    const auto r = run(dir, "alpha --in " + q(dir / "n.wav"));
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(std::abs(j.at("alpha").get<double>() - 1.5) < 0.1);
    CHECK(j.at("reliable").get<bool>());
}

TEST_CASE("mix at 0 dB then eval") {
    TempDir dir;
    const auto clean = testing::speech_proxy(1.0, 16000, 9);
    write_wav(clean, dir / "clean.wav");
    write_wav(Signal(testing::white_noise(20000, 3), 16000), dir / "noise.wav");
    REQUIRE(run(dir, "mix --clean " + q(dir / "clean.wav") + " --noise " + q(dir / "noise.wav") + " --snr 0 --seed 4 --out " +
                         q(dir / "mix.wav"))
                .exit_code == 0);
    const auto r = run(dir, "eval --clean " + q(dir / "clean.wav") + " --processed " + q(dir / "mix.wav"));
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(std::isfinite(j.at("llr").get<double>()));
    CHECK(std::isfinite(j.at("fwsnrseg_db").get<double>()));
    CHECK(j.at("stoi").get<double>() > 0.0);
    CHECK(j.at("stoi").get<double>() < 1.0);
}

TEST_CASE("eval identity and unknown metric") {
    TempDir dir;
    write_wav(testing::speech_proxy(1.0, 16000, 10), dir / "c.wav");
    const auto r = run(dir, "eval --clean " + q(dir / "c.wav") + " --processed " + q(dir / "c.wav"));
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("llr").get<double>() == 0.0);
    CHECK(j.at("fwsnrseg_db").get<double>() == 35.0);
    CHECK(j.at("stoi").get<double>() >= 0.999);
    CHECK(run(dir, "eval --clean " + q(dir / "c.wav") + " --processed " + q(dir / "c.wav") + " --metrics pesq").exit_code !=
          0);
}
