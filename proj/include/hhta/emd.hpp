#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "hhta/signal.hpp"

namespace hhta {

struct Extremum {
    std::size_t index = 0;
    double value = 0.0;
};

struct Extrema {
    std::vector<Extremum> maxima;
    std::vector<Extremum> minima;
};

/// Modes IMF_1..IMF_M and residual of one decomposition. The modes plus the
/// residual add up to the decomposed signal.
struct ImfSet {
    std::vector<Signal> modes;
    Signal residual;

    [[nodiscard]] std::size_t source_len() const noexcept { return residual.size(); }
    [[nodiscard]] std::size_t mode_count() const noexcept { return modes.size(); }

    /// Sum of all modes plus the residual.
    [[nodiscard]] Signal reassemble() const;
    /// Sum of the modes only.
    [[nodiscard]] Signal sum_modes() const;
};

struct EmdConfig {
    std::size_t max_modes = 10;
    /// Sifting stops once sum((h_prev - h)^2) / sum(h_prev^2) drops below this.
    double sift_sd_threshold = 0.2;
    std::size_t max_sift_iters = 100;
    /// Extrema mirrored beyond each end before envelope fitting.
    std::size_t boundary_pad_extrema = 2;

    void validate() const;
};

struct EemdConfig {
    EmdConfig emd;
    std::size_t ensemble_size = 50;
    /// 10*log10(var(x)/var(w)) of the added white noise; +inf adds none.
    double ensemble_snr_db = 30.0;
    std::uint64_t master_seed = 0;
    /// Worker threads for the ensemble trials (0 = hardware concurrency).
    unsigned threads = 0;

    void validate() const;
};

/// Strict interior local extrema. A plateau contributes one extremum at
/// floor((first + last) / 2); the endpoints are never extrema.
Extrema find_extrema(std::span<const double> x);

/// Natural cubic spline through `points`, evaluated at 0..length-1, after
/// mirroring up to `pad` points about each end of the signal.
std::vector<double> envelope(std::span<const Extremum> points, std::size_t length, std::size_t pad);

/// Extracts one IMF from `x` by repeated mean-envelope subtraction.
std::vector<double> sift(std::span<const double> x, const EmdConfig& cfg);

ImfSet emd(const Signal& signal, const EmdConfig& cfg = {});

/// Ensemble EMD: averages the m-th modes of `ensemble_size` decompositions of
/// the signal plus independent white Gaussian noise realizations. The
/// residual is the signal minus the averaged modes.
ImfSet eemd(const Signal& signal, const EemdConfig& cfg = {});

/// Number of sign changes (zeros are skipped).
std::size_t count_zero_crossings(std::span<const double> x);

}  // namespace hhta
