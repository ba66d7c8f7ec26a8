#include <algorithm>
#include <cmath>
#include <numbers>

#include "hhta/signal.hpp"

namespace hhta {

std::size_t FrameGrid::valid_len(std::size_t q) const noexcept {
    const std::size_t s = start(q);
    if (s >= total_len) return 0;
    return std::min(frame_len, total_len - s);
}

FrameGrid frame_grid(std::size_t total_len, std::size_t frame_len, std::size_t step) {
    if (frame_len == 0) throw std::invalid_argument("frame_grid: frame_len must be positive");
    if (step == 0) throw std::invalid_argument("frame_grid: step must be positive");
    if (step > frame_len) {
        throw std::invalid_argument("frame_grid: step (" + std::to_string(step) +
                                    ") exceeds frame_len (" + std::to_string(frame_len) + ")");
    }
    FrameGrid grid;
    grid.frame_len = frame_len;
    grid.step = step;
    grid.total_len = total_len;
    grid.count = (total_len + step - 1) / step;
    return grid;
}

Window make_window(WindowKind kind, std::size_t length) {
    if (length == 0) throw std::invalid_argument("make_window: length must be positive");
    Window w;
    w.kind = kind;
    w.values.assign(length, 1.0);
    if (kind == WindowKind::hann) {
        const double n = static_cast<double>(length);
        for (std::size_t i = 0; i < length; ++i) {
            w.values[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * (static_cast<double>(i) + 0.5) / n);
        }
    }
    return w;
}

WindowKind parse_window_kind(const std::string& name) {
    if (name == "hann") return WindowKind::hann;
    if (name == "rectangular" || name == "rect") return WindowKind::rectangular;
    throw std::invalid_argument("unknown window kind '" + name + "' (expected hann or rectangular)");
}

std::string to_string(WindowKind kind) {
    return kind == WindowKind::hann ? "hann" : "rectangular";
}

void extract_frame(std::span<const double> x, const FrameGrid& grid, std::size_t q,
                   std::span<double> out) {
    if (out.size() != grid.frame_len) throw std::invalid_argument("extract_frame: bad output size");
    const std::size_t s = grid.start(q);
    const std::size_t valid = s < x.size() ? std::min(grid.frame_len, x.size() - s) : 0;
    std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(std::min(s, x.size())), valid, out.begin());
    std::fill(out.begin() + static_cast<std::ptrdiff_t>(valid), out.end(), 0.0);
}

std::vector<double> overlap_sum(const FrameGrid& grid, const Window& window) {
    if (window.length() != grid.frame_len) {
        throw std::invalid_argument("overlap_sum: window length does not match frame length");
    }
    std::vector<double> p(grid.total_len, 0.0);
    for (std::size_t q = 0; q < grid.count; ++q) {
        const std::size_t s = grid.start(q);
        const std::size_t valid = grid.valid_len(q);
        for (std::size_t t = 0; t < valid; ++t) p[s + t] += window.values[t];
    }
    return p;
}

Signal overlap_add(std::span<const std::vector<double>> frames, const FrameGrid& grid,
                   const Window& window, int sample_rate) {
    if (frames.size() != grid.count) {
        throw std::invalid_argument("overlap_add: got " + std::to_string(frames.size()) +
                                    " frames, grid has " + std::to_string(grid.count));
    }
    std::vector<double> out(grid.total_len, 0.0);
    for (std::size_t q = 0; q < grid.count; ++q) {
        if (frames[q].size() != grid.frame_len) {
            throw std::invalid_argument("overlap_add: frame " + std::to_string(q) +
                                        " has wrong length");
        }
        const std::size_t s = grid.start(q);
        const std::size_t valid = grid.valid_len(q);
        for (std::size_t t = 0; t < valid; ++t) out[s + t] += frames[q][t];
    }
    const auto p = overlap_sum(grid, window);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = p[i] < kMinOverlapSum ? 0.0 : out[i] / p[i];
    }
    return Signal(std::move(out), sample_rate);
}

}  // namespace hhta
