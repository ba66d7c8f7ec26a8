#include "hhta/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "hhta/seeding.hpp"

namespace hhta {

Signal::Signal(std::vector<double> samples, int sample_rate)
    : samples_(std::move(samples)), sample_rate_(sample_rate) {
    if (sample_rate_ <= 0) {
        throw std::invalid_argument("Signal: sample rate must be positive, got " +
                                    std::to_string(sample_rate_));
    }
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        if (!std::isfinite(samples_[i])) {
            throw std::invalid_argument("Signal: non-finite sample at index " + std::to_string(i));
        }
    }
}

Signal Signal::zeros(std::size_t length, int sample_rate) {
    return Signal(std::vector<double>(length, 0.0), sample_rate);
}

double Signal::peak() const noexcept {
    double p = 0.0;
    for (double v : samples_) p = std::max(p, std::abs(v));
    return p;
}

Signal add(const Signal& a, const Signal& b) {
    if (a.size() != b.size() || a.sample_rate() != b.sample_rate()) {
        throw std::invalid_argument("add: signals differ in length or rate");
    }
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
    return Signal(std::move(out), a.sample_rate());
}

std::vector<bool> active_mask(std::span<const double> x, std::size_t frame_len, double range_db) {
    if (frame_len == 0) throw std::invalid_argument("active_mask: frame_len must be positive");
    const std::size_t n_frames = (x.size() + frame_len - 1) / frame_len;
    std::vector<double> energy(n_frames, 0.0);
    for (std::size_t f = 0; f < n_frames; ++f) {
        const std::size_t end = std::min(x.size(), (f + 1) * frame_len);
        for (std::size_t i = f * frame_len; i < end; ++i) energy[f] += x[i] * x[i];
        energy[f] /= static_cast<double>(end - f * frame_len);
    }
    std::vector<bool> mask(x.size(), false);
    if (n_frames == 0) return mask;
    const double peak = *std::max_element(energy.begin(), energy.end());
    if (peak <= 0.0) return mask;
    const double floor = peak * std::pow(10.0, -range_db / 10.0);
    for (std::size_t f = 0; f < n_frames; ++f) {
        if (energy[f] < floor) continue;
        const std::size_t end = std::min(x.size(), (f + 1) * frame_len);
        std::fill(mask.begin() + static_cast<std::ptrdiff_t>(f * frame_len),
                  mask.begin() + static_cast<std::ptrdiff_t>(end), true);
    }
    return mask;
}

Signal scale_noise_to_snr(const Signal& clean, const Signal& noise, double snr_db,
                          unsigned long long seed) {
    if (clean.sample_rate() != noise.sample_rate()) {
        throw std::invalid_argument("mix: sample rates differ (" +
                                    std::to_string(clean.sample_rate()) + " vs " +
                                    std::to_string(noise.sample_rate()) + ")");
    }
    if (noise.empty()) throw std::invalid_argument("mix: noise signal is empty");
    if (!std::isfinite(snr_db)) throw std::invalid_argument("mix: SNR must be finite");

    const std::size_t n = clean.size();
    std::mt19937_64 rng(mix_seed(seed, 0));
    std::vector<double> segment(n);
    if (noise.size() >= n) {
        std::uniform_int_distribution<std::size_t> pick(0, noise.size() - n);
        const std::size_t offset = pick(rng);
        std::copy_n(noise.data().begin() + static_cast<std::ptrdiff_t>(offset), n, segment.begin());
    } else {
        std::uniform_int_distribution<std::size_t> pick(0, noise.size() - 1);
        const std::size_t offset = pick(rng);
        for (std::size_t i = 0; i < n; ++i) segment[i] = noise[(offset + i) % noise.size()];
    }

    // 20 ms analysis frames for the activity gate.
    const auto frame = std::max<std::size_t>(1, static_cast<std::size_t>(clean.sample_rate() / 50));
    const auto mask = active_mask(clean.samples(), frame);
    double p_clean = 0.0;
    double p_noise = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!mask[i]) continue;
        p_clean += clean[i] * clean[i];
        p_noise += segment[i] * segment[i];
        ++count;
    }
    if (count == 0 || p_clean <= 0.0) throw DegenerateInputError("mix: clean signal is silent");
    if (p_noise <= 0.0) throw DegenerateInputError("mix: noise is silent over the active region");

    const double gain = std::sqrt(p_clean / p_noise * std::pow(10.0, -snr_db / 10.0));
    for (double& v : segment) v *= gain;
    return Signal(std::move(segment), clean.sample_rate());
}

Signal mix_at_snr(const Signal& clean, const Signal& noise, double snr_db,
                  unsigned long long seed) {
    return add(clean, scale_noise_to_snr(clean, noise, snr_db, seed));
}

}  // namespace hhta
