#include <cmath>

#include "doctest.h"
#include "hhta/metrics.hpp"
#include "json.hpp"
#include "synthetic.hpp"

using namespace hhta;

namespace {

Signal with_white_noise(const Signal& clean, double snr_db, std::uint64_t seed) {
    return mix_at_snr(clean, Signal(testing::white_noise(clean.size(), seed), clean.sample_rate()), snr_db, seed);
}

}  // namespace

TEST_SUITE("lpc") {
    TEST_CASE("levinson recovers an AR(2) model") {
        const auto w = testing::white_noise(200000, 1);
        std::vector<double> x(w.size(), 0.0);
        for (std::size_t i = 2; i < x.size(); ++i) x[i] = w[i] + 1.6 * x[i - 1] - 0.8 * x[i - 2];
        const auto a = levinson(autocorrelation(x, 2), 2);
        CHECK(a[0] == 1.0);
        CHECK(a[1] == doctest::Approx(-1.6).epsilon(0.01));
        CHECK(a[2] == doctest::Approx(0.8).epsilon(0.01));
    }

    TEST_CASE("silent frame gives the trivial filter") {
        const auto a = levinson(std::vector<double>(5, 0.0), 4);
        CHECK(a == std::vector<double>{1, 0, 0, 0, 0});
    }
}

TEST_SUITE("llr") {
    const auto clean = testing::speech_proxy(2.0, 16000, 31);

    TEST_CASE("identical input is exactly zero") { CHECK(llr(clean, clean) == 0.0); }

    TEST_CASE("strong white noise exceeds 0.5") { CHECK(llr(clean, with_white_noise(clean, -5.0, 2)) > 0.5); }

    TEST_CASE("per-frame values are clamped to 2") {
        const Signal other(testing::white_noise(clean.size(), 5), 16000);
        const double v = llr(clean, other);
        CHECK(v <= 2.0);
        CHECK(v > 1.0);
    }

    TEST_CASE("monotone in SNR") {
        const double hi = llr(clean, with_white_noise(clean, 10.0, 3));
        const double mid = llr(clean, with_white_noise(clean, 0.0, 3));
        const double lo = llr(clean, with_white_noise(clean, -10.0, 3));
        CHECK(hi < mid);
        CHECK(mid < lo);
    }

    TEST_CASE("mismatched inputs") {
        CHECK_THROWS(llr(clean, Signal::zeros(clean.size() - 1, 16000)));
        CHECK_THROWS(llr(clean, Signal::zeros(clean.size(), 8000)));
        CHECK_THROWS_AS(llr(Signal::zeros(16000, 16000), Signal::zeros(16000, 16000)), DegenerateInputError);
    }
}

TEST_SUITE("fwsnrseg") {
    const auto clean = testing::speech_proxy(2.0, 16000, 32);

    TEST_CASE("identical input hits the upper clamp") { CHECK(fwsnrseg(clean, clean) == 35.0); }

    TEST_CASE("0 dB noise lies inside the clamp range") {
        const double v = fwsnrseg(clean, with_white_noise(clean, 0.0, 4));
        CHECK(v > -10.0);
        CHECK(v < 35.0);
    }

    TEST_CASE("monotone in SNR") {
        const double hi = fwsnrseg(clean, with_white_noise(clean, 10.0, 3));
        const double mid = fwsnrseg(clean, with_white_noise(clean, 0.0, 3));
        const double lo = fwsnrseg(clean, with_white_noise(clean, -10.0, 3));
        CHECK(hi > mid);
        CHECK(mid > lo);
    }

    TEST_CASE("all-zero output scores 0 dB in every band") {
        // |X - 0|^2 = |X|^2, so each band term is 10 log10(1) = 0.
        CHECK(fwsnrseg(clean, Signal::zeros(clean.size(), 16000)) == doctest::Approx(0.0).epsilon(1e-12));
    }

    TEST_CASE("8 kHz input uses bands up to Nyquist") {
        const auto c8 = resample(clean, 8000);
        CHECK(fwsnrseg(c8, c8) == 35.0);
    }
}

TEST_SUITE("stoi") {
    const auto clean = testing::speech_proxy(3.0, 16000, 33);

    TEST_CASE("identical input") { CHECK(stoi(clean, clean) >= 0.999); }

    TEST_CASE("independent noise scores far below a noisy copy") {
        // The -15 dB clipping step ties clipped envelopes to the clean ones,
        // so the reference procedure floors around 0.3 here rather than 0.
        const Signal other(testing::white_noise(clean.size(), 8), 16000);
        const double indep = stoi(clean, other);
        CHECK(indep <= 0.35);
        CHECK(indep < stoi(clean, with_white_noise(clean, -10.0, 8)) - 0.1);
    }

    TEST_CASE("strictly increasing with SNR") {
        const double lo = stoi(clean, with_white_noise(clean, -10.0, 6));
        const double mid = stoi(clean, with_white_noise(clean, 0.0, 6));
        const double hi = stoi(clean, with_white_noise(clean, 10.0, 6));
        CHECK(lo < mid);
        CHECK(mid < hi);
    }

    TEST_CASE("too-short input") { CHECK_THROWS(stoi(Signal::zeros(4000, 16000), Signal::zeros(4000, 16000))); }
}

TEST_SUITE("mapping") {
    TEST_CASE("logistic values") {
        CHECK(map_intelligibility(9.36 / 13.45, kStoiMapping) == doctest::Approx(50.0).epsilon(1e-4));
        CHECK(std::abs(map_intelligibility(1.0, kStoiMapping) - 98.36) < 0.05);
        CHECK(std::abs(map_intelligibility(0.0, kStoiMapping) - 0.0086) < 0.0005);
        CHECK(map_intelligibility(4.65 / 10.09, kCsiiMapping) == doctest::Approx(50.0));
    }
}

TEST_SUITE("report") {
    TEST_CASE("selection parsing") {
        const auto s = MetricSelection::parse("llr, stoi");
        CHECK(s.llr);
        CHECK_FALSE(s.fwsnrseg);
        CHECK(s.stoi);
        CHECK_THROWS_AS(MetricSelection::parse("llr,pesq"), std::invalid_argument);
        CHECK_THROWS(MetricSelection::parse(""));
    }

    TEST_CASE("identity report") {
        const auto clean = testing::speech_proxy(1.5, 16000, 34);
        const auto r = evaluate(clean, clean);
        const auto j = nlohmann::json::parse(r.to_json());
        CHECK(j.at("llr").get<double>() == 0.0);
        CHECK(j.at("fwsnrseg_db").get<double>() == 35.0);
        CHECK(j.at("stoi").get<double>() >= 0.999);
        CHECK(j.at("stoi_pct").get<double>() == doctest::Approx(map_intelligibility(j.at("stoi"), kStoiMapping)));
        // CSII itself is not computed, so its mapped slot stays empty.
        CHECK_FALSE(j.contains("csii_pct"));
    }

    TEST_CASE("absent metrics are omitted") {
        const auto clean = testing::speech_proxy(1.0, 16000, 35);
        const auto r = evaluate(clean, clean, MetricSelection::parse("llr"));
        const auto j = nlohmann::json::parse(r.to_json());
        CHECK(j.contains("llr"));
        CHECK_FALSE(j.contains("stoi"));
        CHECK_FALSE(j.contains("fwsnrseg_db"));
    }
}
