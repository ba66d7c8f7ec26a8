#include "hhta/emd.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "hhta/parallel.hpp"
#include "hhta/seeding.hpp"

namespace hhta {
namespace {

std::vector<double> add_all(const std::vector<Signal>& parts, std::size_t n) {
    std::vector<double> acc(n, 0.0);
    for (const auto& p : parts) {
        for (std::size_t i = 0; i < n; ++i) acc[i] += p[i];
    }
    return acc;
}

bool has_oscillation(const Extrema& e) { return e.maxima.size() >= 2 && e.minima.size() >= 2; }

// Natural cubic spline through strictly increasing abscissae, evaluated at
// integer positions 0..length-1. Outside the knot range the spline continues
// linearly, matching its zero end curvature.
std::vector<double> natural_spline(const std::vector<double>& xs, const std::vector<double>& ys,
                                   std::size_t length) {
    const std::size_t m = xs.size();
    std::vector<double> second(m, 0.0);
    if (m > 2) {
        // Tridiagonal system for interior second derivatives (Thomas algorithm).
        std::vector<double> diag(m, 0.0), rhs(m, 0.0), upper(m, 0.0);
        for (std::size_t i = 1; i + 1 < m; ++i) {
            const double h0 = xs[i] - xs[i - 1];
            const double h1 = xs[i + 1] - xs[i];
            const double sub = h0 / 6.0;
            diag[i] = (h0 + h1) / 3.0;
            upper[i] = h1 / 6.0;
            rhs[i] = (ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0;
            if (i > 1) {
                const double w = sub / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
        }
        for (std::size_t i = m - 2; i >= 1; --i) {
            second[i] = (rhs[i] - upper[i] * second[i + 1]) / diag[i];
        }
    }

    auto slope_at = [&](std::size_t seg, bool at_right) {
        const double h = xs[seg + 1] - xs[seg];
        const double base = (ys[seg + 1] - ys[seg]) / h;
        return at_right ? base + h * (second[seg] + 2.0 * second[seg + 1]) / 6.0
                        : base - h * (2.0 * second[seg] + second[seg + 1]) / 6.0;
    };

    std::vector<double> out(length);
    std::size_t seg = 0;
    for (std::size_t t = 0; t < length; ++t) {
        const double x = static_cast<double>(t);
        if (x <= xs.front()) {
            out[t] = ys.front() + slope_at(0, false) * (x - xs.front());
            continue;
        }
        if (x >= xs.back()) {
            out[t] = ys.back() + slope_at(m - 2, true) * (x - xs.back());
            continue;
        }
        while (xs[seg + 1] < x) ++seg;
        const double h = xs[seg + 1] - xs[seg];
        const double a = (xs[seg + 1] - x) / h;
        const double b = 1.0 - a;
        out[t] = a * ys[seg] + b * ys[seg + 1] +
                 ((a * a * a - a) * second[seg] + (b * b * b - b) * second[seg + 1]) * h * h / 6.0;
    }
    return out;
}

}  // namespace

void EmdConfig::validate() const {
    if (max_modes < 1) throw std::invalid_argument("EmdConfig: max_modes must be >= 1");
    if (!(sift_sd_threshold > 0.0)) throw std::invalid_argument("EmdConfig: sift_sd_threshold must be > 0");
    if (max_sift_iters < 1) throw std::invalid_argument("EmdConfig: max_sift_iters must be >= 1");
}

void EemdConfig::validate() const {
    emd.validate();
    if (ensemble_size < 1) throw std::invalid_argument("EemdConfig: ensemble_size must be >= 1");
    if (std::isnan(ensemble_snr_db)) throw std::invalid_argument("EemdConfig: ensemble_snr_db is NaN");
}

Signal ImfSet::reassemble() const {
    auto acc = add_all(modes, source_len());
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += residual[i];
    return Signal(std::move(acc), residual.sample_rate());
}

Signal ImfSet::sum_modes() const {
    return Signal(add_all(modes, source_len()), residual.sample_rate());
}

std::size_t count_zero_crossings(std::span<const double> x) {
    std::size_t count = 0;
    int prev = 0;
    for (double v : x) {
        const int s = (v > 0.0) - (v < 0.0);
        if (s == 0) continue;
        if (prev != 0 && s != prev) ++count;
        prev = s;
    }
    return count;
}

Extrema find_extrema(std::span<const double> x) {
    Extrema e;
    const std::size_t n = x.size();
    if (n < 3) return e;
    std::size_t i = 1;
    while (i + 1 < n) {
        const bool rising = x[i] > x[i - 1];
        const bool falling = x[i] < x[i - 1];
        if (!rising && !falling) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < n && x[j + 1] == x[i]) ++j;
        if (j + 1 >= n) break;  // plateau runs into the endpoint
        const std::size_t mid = (i + j) / 2;
        if (rising && x[j + 1] < x[i]) e.maxima.push_back({mid, x[i]});
        if (falling && x[j + 1] > x[i]) e.minima.push_back({mid, x[i]});
        i = j + 1;
    }
    return e;
}

std::vector<double> envelope(std::span<const Extremum> points, std::size_t length, std::size_t pad) {
    if (length == 0) return {};
    const double last = static_cast<double>(length - 1);
    std::vector<double> xs;
    std::vector<double> ys;
    xs.reserve(points.size() + 2 * pad);
    ys.reserve(points.size() + 2 * pad);

    const std::size_t k = std::min(pad, points.size());
    // Mirror about index 0, outermost first; a point sitting on the boundary
    // would mirror onto itself and is skipped.
    for (std::size_t p = k; p-- > 0;) {
        if (points[p].index == 0) continue;
        xs.push_back(-static_cast<double>(points[p].index));
        ys.push_back(points[p].value);
    }
    for (const auto& p : points) {
        xs.push_back(static_cast<double>(p.index));
        ys.push_back(p.value);
    }
    for (std::size_t p = 0; p < k; ++p) {
        const auto& pt = points[points.size() - 1 - p];
        if (static_cast<double>(pt.index) == last) continue;
        xs.push_back(2.0 * last - static_cast<double>(pt.index));
        ys.push_back(pt.value);
    }
    if (xs.size() < 2) {
        throw std::invalid_argument("envelope: need at least 2 points after mirroring, got " +
                                    std::to_string(xs.size()));
    }
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (!(xs[i] > xs[i - 1])) throw std::invalid_argument("envelope: points must have increasing indices");
    }
    return natural_spline(xs, ys, length);
}

std::vector<double> sift(std::span<const double> x, const EmdConfig& cfg) {
    const std::size_t n = x.size();
    std::vector<double> h(x.begin(), x.end());
    std::vector<double> next(n);
    for (std::size_t iter = 0; iter < cfg.max_sift_iters; ++iter) {
        const auto ext = find_extrema(h);
        if (!has_oscillation(ext)) {
            if (iter == 0) throw std::invalid_argument("sift: input needs at least 2 maxima and 2 minima");
            break;
        }
        const auto upper = envelope(ext.maxima, n, cfg.boundary_pad_extrema);
        const auto lower = envelope(ext.minima, n, cfg.boundary_pad_extrema);
        double diff = 0.0;
        double energy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            next[i] = h[i] - 0.5 * (upper[i] + lower[i]);
            const double d = h[i] - next[i];
            diff += d * d;
            energy += h[i] * h[i];
        }
        h.swap(next);
        if (energy == 0.0 || diff / energy < cfg.sift_sd_threshold) break;
    }
    return h;
}

ImfSet emd(const Signal& signal, const EmdConfig& cfg) {
    cfg.validate();
    if (signal.size() < 16) {
        throw std::invalid_argument("emd: signal must have at least 16 samples, got " +
                                    std::to_string(signal.size()));
    }
    const int rate = signal.sample_rate();
    std::vector<double> residual(signal.data());
    ImfSet out;
    while (out.modes.size() < cfg.max_modes && has_oscillation(find_extrema(residual))) {
        auto imf = sift(residual, cfg);
        for (std::size_t i = 0; i < residual.size(); ++i) residual[i] -= imf[i];
        out.modes.emplace_back(std::move(imf), rate);
    }
    out.residual = Signal(std::move(residual), rate);
    return out;
}

ImfSet eemd(const Signal& signal, const EemdConfig& cfg) {
    cfg.validate();
    if (signal.size() < 16) {
        throw std::invalid_argument("eemd: signal must have at least 16 samples, got " +
                                    std::to_string(signal.size()));
    }
    const std::size_t n = signal.size();
    const int rate = signal.sample_rate();
    const auto x = signal.samples();

    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);
    const double noise_std = std::isinf(cfg.ensemble_snr_db) && cfg.ensemble_snr_db > 0
                                 ? 0.0
                                 : std::sqrt(var) * std::pow(10.0, -cfg.ensemble_snr_db / 20.0);

    auto run_trial = [&](std::size_t trial) {
        std::vector<double> xn(x.begin(), x.end());
        if (noise_std > 0.0) {
            std::mt19937_64 rng(mix_seed(cfg.master_seed, trial));
            std::normal_distribution<double> gauss(0.0, noise_std);
            for (double& v : xn) v += gauss(rng);
        }
        return emd(Signal(std::move(xn), rate), cfg.emd);
    };

    // Trials run in batches; the accumulation order is always the trial order.
    std::vector<std::vector<double>> sums;
    const std::size_t batch = std::max<std::size_t>(1, resolve_threads(cfg.threads));
    std::vector<ImfSet> results;
    for (std::size_t first = 0; first < cfg.ensemble_size; first += batch) {
        const std::size_t count = std::min(batch, cfg.ensemble_size - first);
        results.assign(count, ImfSet{});
        parallel_for(count, cfg.threads, [&](std::size_t k) { results[k] = run_trial(first + k); });
        for (const auto& r : results) {
            if (r.mode_count() > sums.size()) sums.resize(r.mode_count(), std::vector<double>(n, 0.0));
            for (std::size_t m = 0; m < r.mode_count(); ++m) {
                const auto mode = r.modes[m].samples();
                auto& acc = sums[m];
                for (std::size_t i = 0; i < n; ++i) acc[i] += mode[i];
            }
        }
    }

    ImfSet out;
    std::vector<double> residual(x.begin(), x.end());
    const double inv = 1.0 / static_cast<double>(cfg.ensemble_size);
    for (auto& acc : sums) {
        for (std::size_t i = 0; i < n; ++i) {
            acc[i] *= inv;
            residual[i] -= acc[i];
        }
        out.modes.emplace_back(std::move(acc), rate);
    }
    out.residual = Signal(std::move(residual), rate);
    return out;
}

}  // namespace hhta
