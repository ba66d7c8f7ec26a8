#pragma once

#include <optional>
#include <string>

#include "hhta/signal.hpp"

namespace hhta {

struct MetricConfig {
    // LLR and fwSNRseg framing.
    double frame_ms = 32.0;
    double hop_ms = 16.0;
    std::size_t lpc_order = 16;
    /// Frames whose clean energy is further than this below the loudest frame are skipped.
    double active_range_db = 40.0;

    // STOI constants.
    int stoi_rate = 10000;
    std::size_t stoi_frame = 256;
    std::size_t stoi_fft = 512;
    std::size_t stoi_bands = 15;
    double stoi_min_freq = 150.0;
    std::size_t stoi_segment = 30;
    double stoi_clip_db = -15.0;
    double stoi_dyn_range_db = 40.0;
};

/// Logistic mapping coefficients f(d) = 100 / (1 + exp(a d + b)).
struct MappingCoefficients {
    double a;
    double b;
};

inline constexpr MappingCoefficients kStoiMapping{-13.45, 9.36};
inline constexpr MappingCoefficients kCsiiMapping{-10.09, 4.65};

/// Mean LPC log-likelihood ratio over active frames; per-frame values are
/// clamped to [0, 2].
double llr(const Signal& clean, const Signal& processed, const MetricConfig& cfg = {});

/// Frequency-weighted segmental SNR in dB; per-band terms clamped to [-10, 35].
double fwsnrseg(const Signal& clean, const Signal& processed, const MetricConfig& cfg = {});

/// Short-time objective intelligibility, clamped to [0, 1].
double stoi(const Signal& clean, const Signal& processed, const MetricConfig& cfg = {});

double map_intelligibility(double d, MappingCoefficients c);

struct MetricReport {
    std::optional<double> llr;
    std::optional<double> fwsnrseg_db;
    std::optional<double> stoi;
    std::optional<double> stoi_pct;
    std::optional<double> csii_pct;

    /// Flat JSON object; absent metrics are omitted.
    [[nodiscard]] std::string to_json(int indent = 2) const;
};

struct MetricSelection {
    bool llr = true;
    bool fwsnrseg = true;
    bool stoi = true;

    /// Parses a comma-separated list of llr, fwsnrseg, stoi.
    static MetricSelection parse(const std::string& list);
};

MetricReport evaluate(const Signal& clean, const Signal& processed, const MetricSelection& which = {},
                      const MetricConfig& cfg = {});

// Building blocks, exposed for testing.

/// Biased autocorrelation r[0..order].
std::vector<double> autocorrelation(std::span<const double> x, std::size_t order);

/// Levinson-Durbin recursion; returns a[0..order] with a[0] = 1 for the
/// prediction-error filter A(z) = sum_k a[k] z^-k.
std::vector<double> levinson(std::span<const double> r, std::size_t order);

}  // namespace hhta
