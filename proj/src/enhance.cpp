#include "hhta/enhance.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "hhta/parallel.hpp"

namespace hhta {
namespace {

double frame_alpha(std::span<const double> x, const FrameGrid& grid, std::size_t q,
                   const AlphaLookup& lookup) {
    const auto frame = x.subspan(grid.start(q), grid.valid_len(q));
    try {
        return estimate_alpha(frame, lookup).alpha;
    } catch (const DegenerateInputError&) {
        return kDegenerateFrameAlpha;
    }
}

}  // namespace

ThresholdCombine parse_threshold_combine(const std::string& name) {
    if (name == "floor") return ThresholdCombine::floor;
    if (name == "literal-min" || name == "literal_min") return ThresholdCombine::literal_min;
    throw std::invalid_argument("unknown threshold mode '" + name + "' (expected floor or literal-min)");
}

std::string to_string(ThresholdCombine c) {
    return c == ThresholdCombine::floor ? "floor" : "literal-min";
}

void EnhanceConfig::validate() const {
    eemd.validate();
    if (!(mu > 0.0 && mu <= 1.0)) throw std::invalid_argument("EnhanceConfig: mu must lie in (0, 1]");
    if (!(alpha_min >= kMinAlpha && alpha_min <= kMaxAlpha)) {
        throw std::invalid_argument("EnhanceConfig: alpha_min must lie in [0.5, 2]");
    }
    (void)frame_grid(frame_len, frame_len, step);
}

void AlphaProfile::write_csv(std::ostream& out) const {
    const auto old_precision = out.precision(8);
    for (std::size_t m = 0; m < modes; ++m) out << "alpha_" << (m + 1) << ',';
    out << "alpha_u,rho,z\n";
    for (std::size_t q = 0; q < frames; ++q) {
        for (std::size_t m = 0; m < modes; ++m) out << alpha(q, m) << ',';
        out << noisy[q] << ',';
        if (thresholds.empty()) out << ',';
        else out << thresholds[q] << ',';
        if (!cut_index.empty()) out << cut_index[q];
        out << '\n';
    }
    out.precision(old_precision);
}

AlphaProfile profile_alpha(const ImfSet& imfs, const Signal& noisy, const FrameGrid& grid,
                           const AlphaLookup& lookup, unsigned threads) {
    const std::size_t n = noisy.size();
    if (imfs.source_len() != n) {
        throw std::invalid_argument("profile_alpha: decomposition length " + std::to_string(imfs.source_len()) +
                                    " differs from signal length " + std::to_string(n));
    }
    if (grid.total_len != n) throw std::invalid_argument("profile_alpha: frame grid does not match signal length");

    AlphaProfile profile;
    profile.frames = grid.count;
    profile.modes = imfs.mode_count();
    profile.per_mode.assign(profile.frames * profile.modes, kDegenerateFrameAlpha);
    profile.noisy.assign(profile.frames, kDegenerateFrameAlpha);

    parallel_for(grid.count, threads, [&](std::size_t q) {
        for (std::size_t m = 0; m < profile.modes; ++m) {
            profile.per_mode[q * profile.modes + m] = frame_alpha(imfs.modes[m].samples(), grid, q, lookup);
        }
        profile.noisy[q] = frame_alpha(noisy.samples(), grid, q, lookup);
    });
    return profile;
}

double threshold(double alpha_u, const EnhanceConfig& cfg) {
    const double scaled = cfg.mu * alpha_u;
    return cfg.threshold_combine == ThresholdCombine::floor ? std::max(scaled, cfg.alpha_min)
                                                            : std::min(scaled, cfg.alpha_min);
}

std::size_t select_cut(std::span<const double> alphas, double rho) {
    for (std::size_t m = alphas.size(); m > 0; --m) {
        if (alphas[m - 1] <= rho) return m;
    }
    return 0;
}

void apply_selection(AlphaProfile& profile, const EnhanceConfig& cfg) {
    profile.thresholds.resize(profile.frames);
    profile.cut_index.resize(profile.frames);
    for (std::size_t q = 0; q < profile.frames; ++q) {
        profile.thresholds[q] = threshold(profile.noisy[q], cfg);
        profile.cut_index[q] = select_cut(profile.frame_alphas(q), profile.thresholds[q]);
    }
}

Signal reconstruct(const ImfSet& imfs, const AlphaProfile& profile, const FrameGrid& grid,
                   const Window& window) {
    const std::size_t n = imfs.source_len();
    if (grid.total_len != n) throw std::invalid_argument("reconstruct: frame grid does not match signal length");
    if (window.length() != grid.frame_len) throw std::invalid_argument("reconstruct: window length mismatch");
    if (profile.frames != grid.count || profile.cut_index.size() != grid.count) {
        throw std::invalid_argument("reconstruct: profile has no cut index for every frame");
    }
    if (profile.modes != imfs.mode_count()) throw std::invalid_argument("reconstruct: profile mode count mismatch");

    // partial[z] = IMF_1 + ... + IMF_z.
    std::vector<std::vector<double>> partial(imfs.mode_count() + 1, std::vector<double>(n, 0.0));
    for (std::size_t m = 0; m < imfs.mode_count(); ++m) {
        const auto mode = imfs.modes[m].samples();
        for (std::size_t i = 0; i < n; ++i) partial[m + 1][i] = partial[m][i] + mode[i];
    }

    std::vector<double> out(n, 0.0);
    for (std::size_t q = 0; q < grid.count; ++q) {
        const std::size_t z = profile.cut_index[q];
        if (z > imfs.mode_count()) throw std::invalid_argument("reconstruct: cut index exceeds mode count");
        if (z == 0) continue;
        const std::size_t s = grid.start(q);
        const std::size_t valid = grid.valid_len(q);
        const auto& kept = partial[z];
        for (std::size_t t = 0; t < valid; ++t) out[s + t] += window.values[t] * kept[s + t];
    }
    const auto p = overlap_sum(grid, window);
    for (std::size_t i = 0; i < n; ++i) out[i] = p[i] < kMinOverlapSum ? 0.0 : out[i] / p[i];
    return Signal(std::move(out), imfs.residual.sample_rate());
}

EnhanceResult enhance(const Signal& noisy, const EnhanceConfig& cfg, const AlphaLookup& lookup) {
    cfg.validate();
    if (noisy.size() * 4 < cfg.frame_len) {
        throw std::invalid_argument("enhance: input of " + std::to_string(noisy.size()) +
                                    " samples is shorter than a quarter frame (" +
                                    std::to_string(cfg.frame_len / 4) + ")");
    }
    const auto grid = frame_grid(noisy.size(), cfg.frame_len, cfg.step);
    const auto window = make_window(cfg.window, cfg.frame_len);
    const auto imfs = eemd(noisy, cfg.eemd);
    auto profile = profile_alpha(imfs, noisy, grid, lookup, cfg.eemd.threads);
    apply_selection(profile, cfg);
    auto enhanced = reconstruct(imfs, profile, grid, window);
    return {std::move(enhanced), std::move(profile)};
}

EnhanceResult enhance(const Signal& noisy, const EnhanceConfig& cfg) {
    return enhance(noisy, cfg, default_lookup());
}

}  // namespace hhta
