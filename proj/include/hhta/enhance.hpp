#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hhta/emd.hpp"
#include "hhta/signal.hpp"
#include "hhta/stable.hpp"

namespace hhta {

/// How the per-frame threshold combines mu * alpha_u with alpha_min.
enum class ThresholdCombine {
    floor,        ///< max(mu * alpha_u, alpha_min): alpha_min is a lower bound
    literal_min,  ///< min(mu * alpha_u, alpha_min)
};

ThresholdCombine parse_threshold_combine(const std::string& name);
std::string to_string(ThresholdCombine c);

/// Pipeline settings. `eemd.threads` also sets the worker count of the
/// per-frame stages.
struct EnhanceConfig {
    EemdConfig eemd{.emd = {.max_modes = 10}, .ensemble_size = 50, .ensemble_snr_db = 30.0};
    std::size_t frame_len = 10240;
    std::size_t step = 128;
    double mu = 0.8;
    double alpha_min = 1.1;
    ThresholdCombine threshold_combine = ThresholdCombine::floor;
    WindowKind window = WindowKind::hann;

    void validate() const;
};

/// Per-frame, per-mode impulsiveness indices and the selection derived from them.
struct AlphaProfile {
    std::size_t frames = 0;
    std::size_t modes = 0;
    /// Row-major frames x modes matrix of alpha_m^q.
    std::vector<double> per_mode;
    /// alpha_u^q of the noisy signal itself.
    std::vector<double> noisy;
    /// rho^q; empty until thresholds are applied.
    std::vector<double> thresholds;
    /// Z^q, the number of leading modes kept; empty until thresholds are applied.
    std::vector<std::size_t> cut_index;

    [[nodiscard]] double alpha(std::size_t q, std::size_t m) const { return per_mode[q * modes + m]; }
    [[nodiscard]] std::span<const double> frame_alphas(std::size_t q) const {
        return std::span<const double>(per_mode).subspan(q * modes, modes);
    }

    /// CSV with one row per frame: alpha_1..alpha_M, alpha_u, rho, z.
    void write_csv(std::ostream& out) const;
};

/// Alpha assigned to frames whose quantile spread is zero (e.g. silence).
inline constexpr double kDegenerateFrameAlpha = 2.0;

/// Estimates alpha on the in-signal part of every frame of every mode and of
/// the noisy signal. Thresholds and cuts are left empty.
AlphaProfile profile_alpha(const ImfSet& imfs, const Signal& noisy, const FrameGrid& grid,
                           const AlphaLookup& lookup, unsigned threads = 0);

double threshold(double alpha_u, const EnhanceConfig& cfg);

/// Largest m (1-based) with alphas[m-1] <= rho, or 0 if none qualifies.
std::size_t select_cut(std::span<const double> alphas, double rho);

/// Fills thresholds and cut indices of `profile` from its alpha estimates.
void apply_selection(AlphaProfile& profile, const EnhanceConfig& cfg);

/// Windowed overlap-add of the first Z^q modes in every frame, normalized by
/// the pointwise window overlap sum. The residual is never included.
Signal reconstruct(const ImfSet& imfs, const AlphaProfile& profile, const FrameGrid& grid,
                   const Window& window);

struct EnhanceResult {
    Signal enhanced;
    AlphaProfile profile;
};

EnhanceResult enhance(const Signal& noisy, const EnhanceConfig& cfg, const AlphaLookup& lookup);
EnhanceResult enhance(const Signal& noisy, const EnhanceConfig& cfg = {});

}  // namespace hhta
