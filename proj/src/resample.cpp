#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "hhta/signal.hpp"

namespace hhta {
namespace {

constexpr double kStopbandDb = 80.0;

// Lowpass prototype at the upsampled rate; passband edge 0.4*min(rates),
// stopband edge 0.5*min(rates).
std::vector<double> design_filter(int up, int down, double source_rate) {
    const double fs_up = source_rate * up;
    const double min_rate = std::min(source_rate, source_rate * up / down);
    const double cutoff = 0.45 * min_rate / fs_up;       // cycles per upsampled sample
    const double transition = 0.1 * min_rate / fs_up;
    const double beta = 0.1102 * (kStopbandDb - 8.7);
    auto taps = static_cast<std::size_t>(
        std::ceil((kStopbandDb - 8.0) / (2.285 * 2.0 * std::numbers::pi * transition))) + 1;
    if (taps % 2 == 0) ++taps;

    std::vector<double> h(taps);
    const double center = static_cast<double>(taps - 1) / 2.0;
    const double i0_beta = std::cyl_bessel_i(0.0, beta);
    for (std::size_t j = 0; j < taps; ++j) {
        const double t = static_cast<double>(j) - center;
        const double sinc = t == 0.0 ? 2.0 * cutoff
                                     : std::sin(2.0 * std::numbers::pi * cutoff * t) / (std::numbers::pi * t);
        const double r = t / center;
        const double kaiser = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0_beta;
        h[j] = sinc * kaiser * up;
    }
    return h;
}

}  // namespace

Signal resample(const Signal& signal, int target_rate) {
    if (target_rate <= 0) throw std::invalid_argument("resample: target rate must be positive");
    const int source_rate = signal.sample_rate();
    if (target_rate == source_rate) return signal;

    const int g = std::gcd(source_rate, target_rate);
    const int up = target_rate / g;
    const int down = source_rate / g;
    const auto h = design_filter(up, down, static_cast<double>(source_rate));
    const auto delay = static_cast<long long>((h.size() - 1) / 2);

    const auto x = signal.samples();
    const auto n_in = static_cast<long long>(x.size());
    const auto n_out = static_cast<std::size_t>(
        std::llround(static_cast<double>(x.size()) * target_rate / source_rate));
    const auto taps = static_cast<long long>(h.size());

    std::vector<double> y(n_out, 0.0);
    for (std::size_t k = 0; k < n_out; ++k) {
        // Upsampled-domain position aligned with the filter's group delay.
        const long long pos = static_cast<long long>(k) * down + delay;
        long long j = pos % up;
        double acc = 0.0;
        for (; j < taps; j += up) {
            const long long idx = (pos - j) / up;
            if (idx < 0) break;
            if (idx < n_in) acc += h[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(idx)];
        }
        y[k] = acc;
    }
    return Signal(std::move(y), target_rate);
}

}  // namespace hhta
