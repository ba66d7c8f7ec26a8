#include <cmath>
#include <sstream>

#include "doctest.h"
#include "hhta/enhance.hpp"
#include "hhta/metrics.hpp"
#include "synthetic.hpp"

using namespace hhta;

TEST_SUITE("threshold") {
    TEST_CASE("floor and literal-min combinations") {
        EnhanceConfig cfg;
        CHECK(threshold(1.6, cfg) == doctest::Approx(1.28));
        CHECK(threshold(1.0, cfg) == doctest::Approx(1.1));
        cfg.threshold_combine = ThresholdCombine::literal_min;
        CHECK(threshold(1.0, cfg) == doctest::Approx(0.8));
        CHECK(threshold(1.6, cfg) == doctest::Approx(1.1));
    }

    TEST_CASE("mode names parse") {
        CHECK(parse_threshold_combine("floor") == ThresholdCombine::floor);
        CHECK(parse_threshold_combine("literal-min") == ThresholdCombine::literal_min);
        CHECK_THROWS(parse_threshold_combine("max"));
    }
}

TEST_SUITE("select_cut") {
    TEST_CASE("last index at or below the threshold") {
        const std::vector<double> a{1.0, 1.05, 1.2, 1.9, 2.0};
        CHECK(select_cut(a, 1.25) == 3);
        const std::vector<double> b{1.9, 2.0};
        CHECK(select_cut(b, 1.1) == 0);
        const std::vector<double> c{1.0, 1.3, 1.05, 2.0};
        CHECK(select_cut(c, 1.1) == 3);
        CHECK(select_cut(std::vector<double>{}, 1.1) == 0);
        const std::vector<double> d{1.1};
        CHECK(select_cut(d, 1.1) == 1);
    }
}

TEST_SUITE("profile") {
    TEST_CASE("a mode made of cms samples profiles near its alpha") {
        const std::size_t n = 40960;
        ImfSet imfs;
        imfs.modes.emplace_back(sample_sas(1.2, n, 4), 16000);
        imfs.residual = Signal::zeros(n, 16000);
        const Signal noisy(sample_sas(1.2, n, 4), 16000);
        const auto grid = frame_grid(n, 10240, 1024);
        const auto p = profile_alpha(imfs, noisy, grid, default_lookup(), 0);
        REQUIRE(p.frames == grid.count);
        REQUIRE(p.modes == 1);
        for (std::size_t q = 0; q + 3 < p.frames; ++q) CHECK(std::abs(p.alpha(q, 0) - 1.2) <= 0.1);
    }

    TEST_CASE("all-zero frames get the sentinel") {
        const std::size_t n = 8192;
        std::vector<double> x(n, 0.0);
        for (std::size_t i = 0; i < 2048; ++i) x[i] = std::sin(0.1 * static_cast<double>(i)) + 0.01 * i;
        ImfSet imfs;
        imfs.modes.emplace_back(x, 16000);
        imfs.residual = Signal::zeros(n, 16000);
        const auto grid = frame_grid(n, 1024, 1024);
        const auto p = profile_alpha(imfs, Signal(x, 16000), grid, default_lookup(), 1);
        CHECK(p.alpha(7, 0) == kDegenerateFrameAlpha);
        CHECK(p.noisy[7] == kDegenerateFrameAlpha);
    }

    TEST_CASE("csv layout") {
        AlphaProfile p;
        p.frames = 2;
        p.modes = 2;
        p.per_mode = {1.0, 1.5, 1.2, 2.0};
        p.noisy = {1.1, 1.3};
        p.thresholds = {1.1, 1.1};
        p.cut_index = {1, 1};
        std::ostringstream out;
        p.write_csv(out);
        std::istringstream in(out.str());
        std::string line;
        std::getline(in, line);
        CHECK(line == "alpha_1,alpha_2,alpha_u,rho,z");
        std::getline(in, line);
        CHECK(line == "1,1.5,1.1,1.1,1");
    }
}

TEST_SUITE("reconstruct") {
    struct Fixture {
        Signal x = Signal(testing::white_noise(20000, 21), 16000);
        ImfSet imfs = emd(x);
        FrameGrid grid = frame_grid(x.size(), 4096, 128);
        Window window = make_window(WindowKind::hann, 4096);
        AlphaProfile profile;
        Fixture() {
            profile.frames = grid.count;
            profile.modes = imfs.mode_count();
            profile.per_mode.assign(profile.frames * profile.modes, 1.0);
            profile.noisy.assign(profile.frames, 1.0);
            profile.thresholds.assign(profile.frames, 1.1);
        }
    };

    TEST_CASE_FIXTURE(Fixture, "keeping every mode returns the sum of modes") {
        profile.cut_index.assign(profile.frames, imfs.mode_count());
        const auto y = reconstruct(imfs, profile, grid, window);
        const auto ref = imfs.sum_modes();
        REQUIRE(y.size() == x.size());
        CHECK(testing::max_abs_diff(y.samples(), ref.samples()) < 1e-6 * ref.peak());
    }

    TEST_CASE_FIXTURE(Fixture, "keeping nothing returns silence") {
        profile.cut_index.assign(profile.frames, 0);
        const auto y = reconstruct(imfs, profile, grid, window);
        CHECK(y.peak() == 0.0);
    }

    TEST_CASE_FIXTURE(Fixture, "keeping only the first mode returns that mode") {
        profile.cut_index.assign(profile.frames, 1);
        const auto y = reconstruct(imfs, profile, grid, window);
        CHECK(testing::max_abs_diff(y.samples(), imfs.modes[0].samples()) < 1e-9 * x.peak());
    }

    TEST_CASE_FIXTURE(Fixture, "shape mismatches are rejected") {
        profile.cut_index.assign(profile.frames - 1, 1);
        CHECK_THROWS(reconstruct(imfs, profile, grid, window));
        profile.cut_index.assign(profile.frames, imfs.mode_count() + 1);
        CHECK_THROWS(reconstruct(imfs, profile, grid, window));
    }
}

TEST_SUITE("enhance") {
    EnhanceConfig fast_config() {
        EnhanceConfig cfg;
        cfg.eemd.ensemble_size = 6;
        cfg.eemd.master_seed = 3;
        cfg.frame_len = 4096;
        cfg.step = 512;
        return cfg;
    }

    TEST_CASE("same seed twice is bit-identical") {
        const auto x = testing::speech_proxy(0.8, 16000, 2);
        const auto cfg = fast_config();
        const auto a = enhance(x, cfg);
        const auto b = enhance(x, cfg);
        CHECK(a.enhanced.data() == b.enhanced.data());
        CHECK(a.profile.cut_index == b.profile.cut_index);
    }

    TEST_CASE("clean harmonic input keeps most of its energy") {
        const auto x = testing::speech_proxy(1.2, 16000, 6);
        auto cfg = fast_config();
        const auto r = enhance(x, cfg);
        double ex = 0.0, ey = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            ex += x[i] * x[i];
            ey += r.enhanced[i] * r.enhanced[i];
        }
        CHECK(ey / ex >= 0.9);
    }

    TEST_CASE("default operating point yields 300 frames and 10 modes") {
        const auto x = testing::speech_proxy(2.4, 16000, 8);
        EnhanceConfig cfg;
        cfg.eemd.ensemble_size = 4;  // grid shape does not depend on N
        const auto r = enhance(x, cfg);
        CHECK(x.size() == 38400);
        CHECK(r.profile.frames == 300);
        CHECK(r.profile.modes == 10);
        CHECK(r.enhanced.size() == x.size());
        CHECK(r.profile.cut_index.size() == 300);
    }

    TEST_CASE("inputs shorter than a quarter frame are rejected") {
        CHECK_THROWS(enhance(Signal(testing::white_noise(2000, 1), 16000), EnhanceConfig{}));
    }

    TEST_CASE("invalid settings are rejected") {
        EnhanceConfig cfg;
        cfg.step = cfg.frame_len + 1;
        CHECK_THROWS(cfg.validate());
        cfg = {};
        cfg.mu = 0.0;
        CHECK_THROWS(cfg.validate());
        cfg = {};
        cfg.alpha_min = 2.5;
        CHECK_THROWS(cfg.validate());
    }
}

TEST_SUITE("end-to-end") {
    TEST_CASE("alpha 1.3 noise at 0 dB: fwSNRseg improves") {
        const auto clean = testing::speech_proxy(2.4, 16000, 1);
        const auto noise = testing::noise_signal(1.3, clean.size(), 16000, 2);
        const auto noisy = mix_at_snr(clean, noise, 0.0, 3);
        EnhanceConfig cfg;
        cfg.eemd.master_seed = 5;
        const auto r = enhance(noisy, cfg);
        const double before = fwsnrseg(clean, noisy);
        const double after = fwsnrseg(clean, r.enhanced);
        INFO("fwSNRseg noisy=" << before << " enhanced=" << after);
        CHECK(after > before);
    }
}
