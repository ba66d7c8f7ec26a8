#include "hhta/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fft.hpp"
#include "json.hpp"

namespace hhta {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_pair(const Signal& clean, const Signal& processed, const char* who) {
    if (clean.sample_rate() != processed.sample_rate()) {
        throw std::invalid_argument(std::string(who) + ": sample rates differ");
    }
    if (clean.size() != processed.size()) {
        throw std::invalid_argument(std::string(who) + ": lengths differ (" + std::to_string(clean.size()) +
                                    " vs " + std::to_string(processed.size()) + ")");
    }
}

// MATLAB-style hanning(N): zero endpoints excluded.
std::vector<double> hanning(std::size_t n) {
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i + 1) /
                                    static_cast<double>(n + 1));
    }
    return w;
}

struct Framing {
    std::size_t len;
    std::size_t hop;
    std::size_t count;
};

Framing segmental_framing(const Signal& s, const MetricConfig& cfg, std::size_t min_len) {
    const auto len = static_cast<std::size_t>(std::lround(cfg.frame_ms * s.sample_rate() / 1000.0));
    const auto hop = static_cast<std::size_t>(std::lround(cfg.hop_ms * s.sample_rate() / 1000.0));
    if (len == 0 || hop == 0) throw std::invalid_argument("metrics: frame and hop must be at least one sample");
    if (len <= min_len) {
        throw std::invalid_argument("metrics: frame of " + std::to_string(len) +
                                    " samples is not longer than the LPC order");
    }
    if (s.size() < len) throw std::invalid_argument("metrics: signal shorter than one analysis frame");
    return {len, hop, (s.size() - len) / hop + 1};
}

void windowed(std::span<const double> x, std::size_t start, const std::vector<double>& w,
              std::vector<double>& out) {
    out.resize(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) out[i] = x[start + i] * w[i];
}

double energy(const std::vector<double>& v) {
    double e = 0.0;
    for (double x : v) e += x * x;
    return e;
}

// Marks frames whose clean energy lies within range_db of the loudest frame.
std::vector<bool> active_frames(std::span<const double> clean, const Framing& f, const std::vector<double>& w,
                                double range_db) {
    std::vector<double> e(f.count);
    std::vector<double> buf;
    for (std::size_t k = 0; k < f.count; ++k) {
        windowed(clean, k * f.hop, w, buf);
        e[k] = energy(buf);
    }
    const double peak = f.count ? *std::max_element(e.begin(), e.end()) : 0.0;
    std::vector<bool> active(f.count, false);
    if (peak <= 0.0) return active;
    const double floor = peak * std::pow(10.0, -range_db / 10.0);
    for (std::size_t k = 0; k < f.count; ++k) active[k] = e[k] >= floor;
    return active;
}

double quadratic_form(const std::vector<double>& a, const std::vector<double>& r) {
    // a^T R a with R the symmetric Toeplitz matrix built from r.
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a.size(); ++j) acc += a[i] * r[i > j ? i - j : j - i] * a[j];
    }
    return acc;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

constexpr std::size_t kFwBands = 25;

// Triangular band weights over rfft bins, mel-spaced between 50 Hz and
// min(8 kHz, fs/2).
std::vector<std::vector<double>> triangular_bands(std::size_t fft_size, int rate) {
    const double top = std::min(8000.0, rate / 2.0);
    const double lo_mel = hz_to_mel(50.0);
    const double hi_mel = hz_to_mel(top);
    std::vector<double> edges(kFwBands + 2);
    for (std::size_t i = 0; i < edges.size(); ++i) {
        edges[i] = mel_to_hz(lo_mel + (hi_mel - lo_mel) * static_cast<double>(i) / (kFwBands + 1));
    }
    const std::size_t bins = fft_size / 2 + 1;
    std::vector<std::vector<double>> bands(kFwBands, std::vector<double>(bins, 0.0));
    for (std::size_t j = 0; j < kFwBands; ++j) {
        const double lo = edges[j], mid = edges[j + 1], hi = edges[j + 2];
        for (std::size_t k = 0; k < bins; ++k) {
            const double f = static_cast<double>(k) * rate / static_cast<double>(fft_size);
            if (f > lo && f < hi) bands[j][k] = f <= mid ? (f - lo) / (mid - lo) : (hi - f) / (hi - mid);
        }
    }
    return bands;
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// ---- STOI helpers -------------------------------------------------------

struct SilenceTrimmed {
    std::vector<double> x;
    std::vector<double> y;
};

SilenceTrimmed remove_silent_frames(std::span<const double> x, std::span<const double> y, double range_db,
                                    std::size_t len, std::size_t hop) {
    const auto w = hanning(len);
    std::vector<std::size_t> starts;
    for (std::size_t s = 0; s + len < x.size(); s += hop) starts.push_back(s);
    std::vector<double> e(starts.size());
    std::vector<double> buf;
    for (std::size_t k = 0; k < starts.size(); ++k) {
        windowed(x, starts[k], w, buf);
        e[k] = 20.0 * std::log10(std::sqrt(energy(buf)) + kEps);
    }
    SilenceTrimmed out;
    if (starts.empty()) return out;
    const double peak = *std::max_element(e.begin(), e.end());
    std::size_t kept = 0;
    for (std::size_t k = 0; k < starts.size(); ++k) {
        if (!(peak - range_db - e[k] < 0.0)) continue;
        const std::size_t base = kept * hop;
        out.x.resize(base + len, 0.0);
        out.y.resize(base + len, 0.0);
        for (std::size_t i = 0; i < len; ++i) {
            out.x[base + i] += w[i] * x[starts[k] + i];
            out.y[base + i] += w[i] * y[starts[k] + i];
        }
        ++kept;
    }
    return out;
}

// Band matrix assigning rfft bins to one-third octave bands.
std::vector<std::pair<std::size_t, std::size_t>> third_octave_bins(int rate, std::size_t fft, std::size_t bands,
                                                                   double min_freq) {
    const std::size_t bins = fft / 2 + 1;
    auto nearest = [&](double f) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < bins; ++k) {
            const double d = std::abs(static_cast<double>(k) * rate / static_cast<double>(fft) - f);
            if (d < best_d) {
                best_d = d;
                best = k;
            }
        }
        return best;
    };
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t j = 0; j < bands; ++j) {
        const double k = static_cast<double>(j);
        const double cf = std::pow(2.0, k / 3.0) * min_freq;
        const double fl = std::sqrt(cf * std::pow(2.0, (k - 1.0) / 3.0) * min_freq);
        const double fr = std::sqrt(cf * std::pow(2.0, (k + 1.0) / 3.0) * min_freq);
        out.emplace_back(nearest(fl), nearest(fr));  // bins [first, second)
    }
    return out;
}

// Band envelopes, bands x frames.
std::vector<std::vector<double>> band_envelopes(const std::vector<double>& x, const MetricConfig& cfg,
                                                const detail::RealFft& fft,
                                                const std::vector<std::pair<std::size_t, std::size_t>>& bands) {
    const auto w = hanning(cfg.stoi_frame);
    const std::size_t hop = cfg.stoi_frame / 2;
    std::vector<std::size_t> starts;
    for (std::size_t s = 0; s + cfg.stoi_frame < x.size(); s += hop) starts.push_back(s);
    std::vector<std::vector<double>> env(bands.size(), std::vector<double>(starts.size(), 0.0));
    std::vector<double> buf;
    std::vector<std::complex<double>> spec;
    for (std::size_t m = 0; m < starts.size(); ++m) {
        windowed(x, starts[m], w, buf);
        fft.forward(buf, spec);
        for (std::size_t j = 0; j < bands.size(); ++j) {
            double acc = 0.0;
            for (std::size_t k = bands[j].first; k < bands[j].second; ++k) acc += std::norm(spec[k]);
            env[j][m] = std::sqrt(acc);
        }
    }
    return env;
}

}  // namespace

std::vector<double> autocorrelation(std::span<const double> x, std::size_t order) {
    std::vector<double> r(order + 1, 0.0);
    for (std::size_t lag = 0; lag <= order && lag < x.size(); ++lag) {
        double acc = 0.0;
        for (std::size_t i = lag; i < x.size(); ++i) acc += x[i] * x[i - lag];
        r[lag] = acc;
    }
    return r;
}

std::vector<double> levinson(std::span<const double> r, std::size_t order) {
    if (r.size() < order + 1) throw std::invalid_argument("levinson: need order + 1 autocorrelation lags");
    std::vector<double> a(order + 1, 0.0);
    a[0] = 1.0;
    double err = r[0];
    if (!(err > 0.0)) return a;
    std::vector<double> prev(order + 1);
    for (std::size_t i = 1; i <= order; ++i) {
        double acc = r[i];
        for (std::size_t j = 1; j < i; ++j) acc += a[j] * r[i - j];
        const double k = -acc / err;
        prev = a;
        for (std::size_t j = 1; j < i; ++j) a[j] = prev[j] + k * prev[i - j];
        a[i] = k;
        err *= 1.0 - k * k;
        if (!(err > 0.0)) break;
    }
    return a;
}

double llr(const Signal& clean, const Signal& processed, const MetricConfig& cfg) {
    check_pair(clean, processed, "llr");
    const auto f = segmental_framing(clean, cfg, cfg.lpc_order);
    const auto w = hanning(f.len);
    const auto active = active_frames(clean.samples(), f, w, cfg.active_range_db);

    double sum = 0.0;
    std::size_t count = 0;
    std::vector<double> cb, pb;
    for (std::size_t k = 0; k < f.count; ++k) {
        if (!active[k]) continue;
        windowed(clean.samples(), k * f.hop, w, cb);
        windowed(processed.samples(), k * f.hop, w, pb);
        const auto rc = autocorrelation(cb, cfg.lpc_order);
        const auto rp = autocorrelation(pb, cfg.lpc_order);
        const auto ac = levinson(rc, cfg.lpc_order);
        const auto ap = levinson(rp, cfg.lpc_order);
        const double num = quadratic_form(ap, rc);
        const double den = quadratic_form(ac, rc);
        double value = 2.0;
        if (den > 0.0 && num > 0.0) value = std::clamp(std::log(num / den), 0.0, 2.0);
        sum += value;
        ++count;
    }
    if (count == 0) throw DegenerateInputError("llr: clean signal has no active frames");
    return sum / static_cast<double>(count);
}

double fwsnrseg(const Signal& clean, const Signal& processed, const MetricConfig& cfg) {
    check_pair(clean, processed, "fwsnrseg");
    const auto f = segmental_framing(clean, cfg, 0);
    const auto w = hanning(f.len);
    const auto active = active_frames(clean.samples(), f, w, cfg.active_range_db);
    const detail::RealFft fft(next_pow2(2 * f.len));
    const auto bands = triangular_bands(fft.size(), clean.sample_rate());
    constexpr double kGamma = 0.2;

    double sum = 0.0;
    std::size_t count = 0;
    std::vector<double> cb, pb;
    for (std::size_t k = 0; k < f.count; ++k) {
        if (!active[k]) continue;
        windowed(clean.samples(), k * f.hop, w, cb);
        windowed(processed.samples(), k * f.hop, w, pb);
        const auto cm = fft.magnitude(cb);
        const auto pm = fft.magnitude(pb);
        double num = 0.0;
        double den = 0.0;
        for (const auto& band : bands) {
            double xc = 0.0, xp = 0.0;
            for (std::size_t b = 0; b < band.size(); ++b) {
                xc += band[b] * cm[b];
                xp += band[b] * pm[b];
            }
            const double err = (xc - xp) * (xc - xp);
            const double snr = err > 0.0 ? 10.0 * std::log10(xc * xc / err) : 35.0;
            const double weight = std::pow(xc, kGamma);
            num += weight * std::clamp(snr, -10.0, 35.0);
            den += weight;
        }
        if (den <= 0.0) continue;
        sum += num / den;
        ++count;
    }
    if (count == 0) throw DegenerateInputError("fwsnrseg: clean signal has no active frames");
    return sum / static_cast<double>(count);
}

double stoi(const Signal& clean, const Signal& processed, const MetricConfig& cfg) {
    check_pair(clean, processed, "stoi");
    if (clean.size() * 2 < static_cast<std::size_t>(clean.sample_rate())) {
        throw std::invalid_argument("stoi: input must be at least 0.5 s long");
    }
    const auto x = resample(clean, cfg.stoi_rate);
    const auto y = resample(processed, cfg.stoi_rate);
    const auto trimmed = remove_silent_frames(x.samples(), y.samples(), cfg.stoi_dyn_range_db, cfg.stoi_frame,
                                              cfg.stoi_frame / 2);

    const detail::RealFft fft(cfg.stoi_fft);
    const auto bands = third_octave_bins(cfg.stoi_rate, cfg.stoi_fft, cfg.stoi_bands, cfg.stoi_min_freq);
    const auto xe = band_envelopes(trimmed.x, cfg, fft, bands);
    const auto ye = band_envelopes(trimmed.y, cfg, fft, bands);
    const std::size_t frames = xe.empty() ? 0 : xe.front().size();
    const std::size_t seg = cfg.stoi_segment;
    if (frames < seg) {
        throw std::invalid_argument("stoi: not enough speech frames after silence removal (" +
                                    std::to_string(frames) + " < " + std::to_string(seg) + ")");
    }

    const double clip = std::pow(10.0, -cfg.stoi_clip_db / 20.0);
    const std::size_t segments = frames - seg + 1;
    double total = 0.0;
    std::vector<double> xs(seg), ys(seg);
    for (std::size_t m = 0; m < segments; ++m) {
        for (std::size_t j = 0; j < xe.size(); ++j) {
            double nx = 0.0, ny = 0.0;
            for (std::size_t t = 0; t < seg; ++t) {
                xs[t] = xe[j][m + t];
                ys[t] = ye[j][m + t];
                nx += xs[t] * xs[t];
                ny += ys[t] * ys[t];
            }
            const double gain = std::sqrt(nx) / (std::sqrt(ny) + kEps);
            double mx = 0.0, my = 0.0;
            for (std::size_t t = 0; t < seg; ++t) {
                ys[t] = std::min(ys[t] * gain, xs[t] * (1.0 + clip));
                mx += xs[t];
                my += ys[t];
            }
            mx /= static_cast<double>(seg);
            my /= static_cast<double>(seg);
            double sxy = 0.0, sxx = 0.0, syy = 0.0;
            for (std::size_t t = 0; t < seg; ++t) {
                const double dx = xs[t] - mx;
                const double dy = ys[t] - my;
                sxy += dx * dy;
                sxx += dx * dx;
                syy += dy * dy;
            }
            total += sxy / ((std::sqrt(sxx) + kEps) * (std::sqrt(syy) + kEps));
        }
    }
    const double d = total / static_cast<double>(segments * xe.size());
    return std::clamp(d, 0.0, 1.0);
}

double map_intelligibility(double d, MappingCoefficients c) {
    return 100.0 / (1.0 + std::exp(c.a * d + c.b));
}

std::string MetricReport::to_json(int indent) const {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    if (llr) j["llr"] = *llr;
    if (fwsnrseg_db) j["fwsnrseg_db"] = *fwsnrseg_db;
    if (stoi) j["stoi"] = *stoi;
    if (stoi_pct) j["stoi_pct"] = *stoi_pct;
    if (csii_pct) j["csii_pct"] = *csii_pct;
    return j.dump(indent);
}

MetricSelection MetricSelection::parse(const std::string& list) {
    MetricSelection sel{false, false, false};
    std::stringstream in(list);
    std::string item;
    bool any = false;
    while (std::getline(in, item, ',')) {
        const auto first = item.find_first_not_of(" \t");
        const auto last = item.find_last_not_of(" \t");
        item = first == std::string::npos ? std::string() : item.substr(first, last - first + 1);
        if (item.empty()) continue;
        if (item == "llr") sel.llr = true;
        else if (item == "fwsnrseg") sel.fwsnrseg = true;
        else if (item == "stoi") sel.stoi = true;
        else throw std::invalid_argument("unknown metric '" + item + "' (expected llr, fwsnrseg, stoi)");
        any = true;
    }
    if (!any) throw std::invalid_argument("no metrics selected");
    return sel;
}

MetricReport evaluate(const Signal& clean, const Signal& processed, const MetricSelection& which,
                      const MetricConfig& cfg) {
    MetricReport report;
    if (which.llr) report.llr = llr(clean, processed, cfg);
    if (which.fwsnrseg) report.fwsnrseg_db = fwsnrseg(clean, processed, cfg);
    if (which.stoi) {
        report.stoi = stoi(clean, processed, cfg);
        report.stoi_pct = map_intelligibility(*report.stoi, kStoiMapping);
    }
    return report;
}

}  // namespace hhta
