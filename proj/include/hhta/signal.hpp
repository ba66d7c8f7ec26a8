#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hhta {

/// Raised when an input file cannot be parsed or violates a format constraint.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a statistic is undefined for the given data (e.g. zero spread).
class DegenerateInputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Mono sample sequence with a sample rate.
///
/// Construction validates that the rate is positive and that every sample is
/// finite; a Signal that exists is always well-formed.
class Signal {
public:
    Signal() = default;
    Signal(std::vector<double> samples, int sample_rate);

    /// Zero-filled signal of the given length.
    static Signal zeros(std::size_t length, int sample_rate);

    [[nodiscard]] std::span<const double> samples() const noexcept { return samples_; }
    [[nodiscard]] const std::vector<double>& data() const noexcept { return samples_; }
    [[nodiscard]] int sample_rate() const noexcept { return sample_rate_; }
    [[nodiscard]] std::size_t size() const noexcept { return samples_.size(); }
    [[nodiscard]] bool empty() const noexcept { return samples_.empty(); }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return samples_[i]; }

    /// Largest absolute sample value (0 for an empty signal).
    [[nodiscard]] double peak() const noexcept;

    /// Moves the samples out, leaving the signal empty.
    [[nodiscard]] std::vector<double> release() && noexcept { return std::move(samples_); }

private:
    std::vector<double> samples_;
    int sample_rate_ = 1;
};

// ---------------------------------------------------------------------------
// WAV I/O

/// Reads a mono RIFF/WAVE file holding 16-bit PCM or 32-bit IEEE float data.
/// PCM16 samples are scaled by 1/32768.
Signal read_wav(const std::filesystem::path& path);

/// Writes a mono 32-bit float WAV file.
void write_wav(const Signal& signal, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Framing

/// Regular grid of overlapping frames over a signal of `total_len` samples.
/// Frame q covers [q*step, q*step + frame_len); samples past total_len are
/// zero padding.
struct FrameGrid {
    std::size_t frame_len = 0;
    std::size_t step = 0;
    std::size_t count = 0;
    std::size_t total_len = 0;

    [[nodiscard]] std::size_t start(std::size_t q) const noexcept { return q * step; }
    /// Number of frame samples that fall inside the signal.
    [[nodiscard]] std::size_t valid_len(std::size_t q) const noexcept;
};

FrameGrid frame_grid(std::size_t total_len, std::size_t frame_len, std::size_t step);

enum class WindowKind { hann, rectangular };

struct Window {
    WindowKind kind = WindowKind::hann;
    std::vector<double> values;

    [[nodiscard]] std::size_t length() const noexcept { return values.size(); }
};

/// Builds a window of the given length.
///
/// The Hann window is sampled at half-integer offsets,
/// w[n] = 0.5 - 0.5 cos(2 pi (n + 0.5) / N), which is symmetric, strictly
/// positive, and sums to exactly N / (2 * hop) under any hop dividing N / 2.
Window make_window(WindowKind kind, std::size_t length);

WindowKind parse_window_kind(const std::string& name);
std::string to_string(WindowKind kind);

/// Copies frame q of `x` (zero padded past the end) into `out`.
void extract_frame(std::span<const double> x, const FrameGrid& grid, std::size_t q,
                   std::span<double> out);

/// Pointwise window-overlap sum P(t) = sum_q w(t - q*step) over the grid.
std::vector<double> overlap_sum(const FrameGrid& grid, const Window& window);

/// Overlap-adds already windowed frames and divides by the pointwise window
/// overlap sum. Positions where that sum is below 1e-8 are emitted as 0.
Signal overlap_add(std::span<const std::vector<double>> frames, const FrameGrid& grid,
                   const Window& window, int sample_rate);

/// Minimum overlap sum below which overlap_add emits zeros.
inline constexpr double kMinOverlapSum = 1e-8;

// ---------------------------------------------------------------------------
// Resampling

/// Rational-ratio polyphase resampler using a Kaiser-windowed sinc filter.
/// Output length is round(len * target / source).
Signal resample(const Signal& signal, int target_rate);

// ---------------------------------------------------------------------------
// Mixing helpers

/// Marks samples belonging to frames whose energy lies within `range_db` of
/// the loudest frame. Frames are non-overlapping, `frame_len` samples long.
std::vector<bool> active_mask(std::span<const double> x, std::size_t frame_len,
                              double range_db = 40.0);

/// Crops (random offset) or loops `noise` to the clean length, then scales it
/// so that the clean-to-noise power ratio over the clean active region is
/// `snr_db`. Returns the scaled noise; the mixture is clean + returned noise.
Signal scale_noise_to_snr(const Signal& clean, const Signal& noise, double snr_db,
                          unsigned long long seed);

/// clean + scale_noise_to_snr(clean, noise, snr_db, seed).
Signal mix_at_snr(const Signal& clean, const Signal& noise, double snr_db,
                  unsigned long long seed);

/// Sample-wise sum of equal-length signals.
Signal add(const Signal& a, const Signal& b);

}  // namespace hhta
