// hhta: command-line front end for impulsive-noise speech enhancement.
//
//   hhta enhance     --in noisy.wav --out enhanced.wav [--profile alpha.csv]
//   hhta decompose   --in x.wav --out prefix_
//   hhta alpha       --in x.wav [--profile alpha.csv]
//   hhta mix         --clean s.wav --noise n.wav --snr 0 --out mix.wav
//   hhta synth-noise --alpha 1.5 --duration 2.4 --out noise.wav
//   hhta eval        --clean s.wav --processed y.wav [--metrics stoi,llr,fwsnrseg]

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>

#include "CLI11.hpp"
#include "hhta/emd.hpp"
#include "hhta/enhance.hpp"
#include "hhta/metrics.hpp"
#include "hhta/signal.hpp"
#include "hhta/stable.hpp"
#include "json.hpp"

namespace {

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DecompositionFlags {
    std::uint64_t seed = 0;
    std::size_t ensemble = 50;
    double ensemble_snr = 30.0;
    std::size_t modes = 10;
    unsigned threads = 0;

    void attach(CLI::App& cmd) {
        cmd.add_option("--seed", seed, "Master seed of the ensemble noise")->capture_default_str();
        cmd.add_option("--ensemble", ensemble, "Ensemble size N (white noise realizations)")
            ->capture_default_str()
            ->check(CLI::PositiveNumber);
        cmd.add_option("--ensemble-snr", ensemble_snr, "Ensemble noise level, dB below the signal (inf = none)")
            ->capture_default_str();
        cmd.add_option("--modes", modes, "Maximum number of IMFs M")->capture_default_str()->check(CLI::PositiveNumber);
        cmd.add_option("--threads", threads, "Worker threads (0 = all cores)")->capture_default_str();
    }

    [[nodiscard]] hhta::EemdConfig eemd() const {
        hhta::EemdConfig cfg;
        cfg.emd.max_modes = modes;
        cfg.ensemble_size = ensemble;
        cfg.ensemble_snr_db = ensemble_snr;
        cfg.master_seed = seed;
        cfg.threads = threads;
        cfg.validate();
        return cfg;
    }
};

hhta::AlphaLookup load_lookup(const std::string& path) {
    return path.empty() ? hhta::default_lookup() : hhta::AlphaLookup::load(path);
}

void write_profile(const hhta::AlphaProfile& profile, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write profile " + path);
    profile.write_csv(out);
    if (!out) throw std::runtime_error("failed writing profile " + path);
}

std::string two_digits(std::size_t v) {
    return v < 10 ? "0" + std::to_string(v) : std::to_string(v);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"HHT-alpha speech enhancement for impulsive acoustic noise"};
    app.require_subcommand(1);
    std::function<void()> action;

    // enhance ---------------------------------------------------------------
    auto* enhance = app.add_subcommand("enhance", "Enhance a noisy mono WAV file");
    std::string enh_in, enh_out, enh_profile, enh_lookup;
    DecompositionFlags enh_dec;
    std::size_t frame = 10240, step = 128;
    double mu = 0.8, alpha_min = 1.1;
    std::string threshold_mode = "floor", window = "hann";
    enhance->add_option("--in", enh_in, "Noisy input WAV")->required()->check(CLI::ExistingFile);
    enhance->add_option("--out", enh_out, "Enhanced output WAV (float32)")->required();
    enh_dec.attach(*enhance);
    enhance->add_option("--frame", frame, "Frame length T_d in samples")->capture_default_str();
    enhance->add_option("--step", step, "Frame step S_d in samples")->capture_default_str();
    enhance->add_option("--mu", mu, "Threshold scale mu applied to the noisy-frame alpha")->capture_default_str();
    enhance->add_option("--alpha-min", alpha_min, "Threshold bound alpha_min")->capture_default_str();
    enhance->add_option("--threshold-mode", threshold_mode, "floor = max(mu*alpha_u, alpha_min); literal-min = min(...)")
        ->capture_default_str()
        ->check(CLI::IsMember({"floor", "literal-min"}));
    enhance->add_option("--window", window, "Synthesis window")->capture_default_str()->check(
        CLI::IsMember({"hann", "rectangular"}));
    enhance->add_option("--profile", enh_profile, "Write the per-frame alpha profile as CSV");
    enhance->add_option("--lookup", enh_lookup, "Alternative alpha lookup table file");
    enhance->callback([&] {
        action = [&] {
            hhta::EnhanceConfig cfg;
            cfg.eemd = enh_dec.eemd();
            cfg.frame_len = frame;
            cfg.step = step;
            cfg.mu = mu;
            cfg.alpha_min = alpha_min;
            cfg.threshold_combine = hhta::parse_threshold_combine(threshold_mode);
            cfg.window = hhta::parse_window_kind(window);
            try {
                cfg.validate();
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
            const auto lookup = load_lookup(enh_lookup);
            const auto noisy = hhta::read_wav(enh_in);
            const auto result = hhta::enhance(noisy, cfg, lookup);
            hhta::write_wav(result.enhanced, enh_out);
            if (!enh_profile.empty()) write_profile(result.profile, enh_profile);
        };
    });

    // decompose -------------------------------------------------------------
    auto* decompose = app.add_subcommand("decompose", "Write the EEMD modes and residual as WAV files");
    std::string dec_in, dec_out;
    DecompositionFlags dec_flags;
    decompose->add_option("--in", dec_in, "Input WAV")->required()->check(CLI::ExistingFile);
    decompose->add_option("--out", dec_out, "Output prefix; writes <prefix>IMF_01.wav ... and <prefix>residual.wav")
        ->required();
    dec_flags.attach(*decompose);
    decompose->callback([&] {
        action = [&] {
            hhta::EemdConfig cfg;
            try {
                cfg = dec_flags.eemd();
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
            const auto x = hhta::read_wav(dec_in);
            const auto imfs = hhta::eemd(x, cfg);
            for (std::size_t m = 0; m < imfs.mode_count(); ++m) {
                hhta::write_wav(imfs.modes[m], dec_out + "IMF_" + two_digits(m + 1) + ".wav");
            }
            hhta::write_wav(imfs.residual, dec_out + "residual.wav");
            std::cout << imfs.mode_count() << " modes written with prefix " << dec_out << '\n';
        };
    });

    // alpha -----------------------------------------------------------------
    auto* alpha = app.add_subcommand("alpha", "Estimate the impulsiveness index of a file and optionally its per-frame IMF profile");
    std::string al_in, al_profile, al_lookup;
    DecompositionFlags al_dec;
    std::size_t al_frame = 10240, al_step = 128;
    alpha->add_option("--in", al_in, "Input WAV")->required()->check(CLI::ExistingFile);
    alpha->add_option("--profile", al_profile, "Decompose and write the per-frame alpha profile as CSV");
    alpha->add_option("--frame", al_frame, "Frame length T_d in samples")->capture_default_str();
    alpha->add_option("--step", al_step, "Frame step S_d in samples")->capture_default_str();
    alpha->add_option("--lookup", al_lookup, "Alternative alpha lookup table file");
    al_dec.attach(*alpha);
    alpha->callback([&] {
        action = [&] {
            hhta::FrameGrid grid;
            hhta::EemdConfig cfg;
            try {
                cfg = al_dec.eemd();
                grid = hhta::frame_grid(0, al_frame, al_step);
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
            const auto lookup = load_lookup(al_lookup);
            const auto x = hhta::read_wav(al_in);
            const auto est = hhta::estimate_alpha(x.samples(), lookup);
            nlohmann::ordered_json j;
            j["alpha"] = est.alpha;
            j["nu_alpha"] = est.nu_alpha;
            j["samples"] = est.sample_count;
            j["reliable"] = est.reliable;
            j["lookup"] = hhta::to_string(lookup.provenance());
            if (!al_profile.empty()) {
                const auto imfs = hhta::eemd(x, cfg);
                grid = hhta::frame_grid(x.size(), al_frame, al_step);
                const auto profile = hhta::profile_alpha(imfs, x, grid, lookup, cfg.threads);
                write_profile(profile, al_profile);
                std::vector<double> mean(profile.modes, 0.0);
                for (std::size_t q = 0; q < profile.frames; ++q) {
                    for (std::size_t m = 0; m < profile.modes; ++m) mean[m] += profile.alpha(q, m);
                }
                for (auto& v : mean) v /= static_cast<double>(std::max<std::size_t>(1, profile.frames));
                j["mean_mode_alpha"] = mean;
            }
            std::cout << j.dump(2) << '\n';
        };
    });

    // mix -------------------------------------------------------------------
    auto* mix = app.add_subcommand("mix", "Add noise to clean speech at a target SNR");
    std::string mix_clean, mix_noise, mix_out;
    double snr = 0.0;
    std::uint64_t mix_seed = 0;
    mix->add_option("--clean", mix_clean, "Clean speech WAV")->required()->check(CLI::ExistingFile);
    mix->add_option("--noise", mix_noise, "Noise WAV (cropped at a random offset or looped)")
        ->required()
        ->check(CLI::ExistingFile);
    mix->add_option("--snr", snr, "Target SNR in dB over the active speech region")->required();
    mix->add_option("--out", mix_out, "Mixture WAV (float32, not clipped)")->required();
    mix->add_option("--seed", mix_seed, "Seed of the noise crop offset")->capture_default_str();
    mix->callback([&] {
        action = [&] {
            const auto clean = hhta::read_wav(mix_clean);
            const auto noise = hhta::read_wav(mix_noise);
            hhta::write_wav(hhta::mix_at_snr(clean, noise, snr, mix_seed), mix_out);
        };
    });

    // synth-noise -----------------------------------------------------------
    auto* synth = app.add_subcommand("synth-noise", "Write symmetric alpha-stable noise, peak-normalized to 0.5");
    double syn_alpha = 1.5, duration = 2.4;
    int rate = 16000;
    std::uint64_t syn_seed = 0;
    std::string syn_out;
    synth->add_option("--alpha", syn_alpha, "Characteristic exponent in (0, 2]")->capture_default_str();
    synth->add_option("--duration", duration, "Duration in seconds")->capture_default_str();
    synth->add_option("--rate", rate, "Sample rate in Hz")->capture_default_str();
    synth->add_option("--seed", syn_seed, "Random seed")->capture_default_str();
    synth->add_option("--out", syn_out, "Output WAV (float32)")->required();
    synth->callback([&] {
        action = [&] {
            if (!(syn_alpha > 0.0 && syn_alpha <= 2.0)) throw UsageError("--alpha must lie in (0, 2]");
            if (!(duration > 0.0)) throw UsageError("--duration must be positive");
            if (rate <= 0) throw UsageError("--rate must be positive");
            const auto n = static_cast<std::size_t>(std::llround(duration * rate));
            auto samples = hhta::sample_sas(syn_alpha, n, syn_seed);
            double peak = 0.0;
            for (double v : samples) peak = std::max(peak, std::abs(v));
            if (peak > 0.0) {
                for (double& v : samples) v *= 0.5 / peak;
            }
            hhta::write_wav(hhta::Signal(std::move(samples), rate), syn_out);
        };
    });

    // eval ------------------------------------------------------------------
    auto* eval = app.add_subcommand("eval", "Objective quality and intelligibility of a processed file");
    std::string ev_clean, ev_processed, metrics = "llr,fwsnrseg,stoi";
    eval->add_option("--clean", ev_clean, "Clean reference WAV")->required()->check(CLI::ExistingFile);
    eval->add_option("--processed", ev_processed, "Processed WAV")->required()->check(CLI::ExistingFile);
    eval->add_option("--metrics", metrics, "Comma-separated subset of llr, fwsnrseg, stoi")->capture_default_str();
    eval->callback([&] {
        action = [&] {
            hhta::MetricSelection which;
            try {
                which = hhta::MetricSelection::parse(metrics);
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
            const auto clean = hhta::read_wav(ev_clean);
            const auto processed = hhta::read_wav(ev_processed);
            std::cout << hhta::evaluate(clean, processed, which).to_json() << '\n';
        };
    });

    CLI11_PARSE(app, argc, argv);
    try {
        action();
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
