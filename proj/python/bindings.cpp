#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <limits>

#include "hhta/emd.hpp"
#include "hhta/enhance.hpp"
#include "hhta/metrics.hpp"
#include "hhta/signal.hpp"
#include "hhta/stable.hpp"

namespace py = pybind11;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const Array& a) {
    if (a.ndim() != 1) throw std::invalid_argument("expected a 1-D array");
    return {a.data(), a.data() + a.size()};
}

Array to_array(std::span<const double> v) {
    return Array(static_cast<py::ssize_t>(v.size()), v.data());
}

hhta::Signal to_signal(const Array& a, int rate) { return hhta::Signal(to_vector(a), rate); }

py::dict imfs_to_dict(const hhta::ImfSet& imfs) {
    py::list modes;
    for (const auto& m : imfs.modes) modes.append(to_array(m.samples()));
    py::dict d;
    d["modes"] = modes;
    d["residual"] = to_array(imfs.residual.samples());
    return d;
}

hhta::EemdConfig eemd_config(std::size_t modes, std::size_t ensemble, double ensemble_snr, std::uint64_t seed,
                             unsigned threads) {
    hhta::EemdConfig cfg;
    cfg.emd.max_modes = modes;
    cfg.ensemble_size = ensemble;
    cfg.ensemble_snr_db = ensemble_snr;
    cfg.master_seed = seed;
    cfg.threads = threads;
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Impulsive-noise speech enhancement with EEMD and alpha-stable mode selection";

    py::register_exception<hhta::FormatError>(m, "FormatError", PyExc_ValueError);
    py::register_exception<hhta::DegenerateInputError>(m, "DegenerateInputError", PyExc_ValueError);

    m.def(
        "read_wav",
        [](const std::filesystem::path& path) {
            const auto s = hhta::read_wav(path);
            return py::make_tuple(to_array(s.samples()), s.sample_rate());
        },
        py::arg("path"), "Read a mono WAV file; returns (samples, sample_rate).");
    m.def(
        "write_wav",
        [](const std::filesystem::path& path, const Array& x, int rate) { hhta::write_wav(to_signal(x, rate), path); },
        py::arg("path"), py::arg("samples"), py::arg("sample_rate"), "Write a mono 32-bit float WAV file.");

    m.def(
        "emd",
        [](const Array& x, std::size_t modes) {
            hhta::EmdConfig cfg;
            cfg.max_modes = modes;
            const auto signal = to_signal(x, 1);
            hhta::ImfSet imfs;
            {
                py::gil_scoped_release release;
                imfs = hhta::emd(signal, cfg);
            }
            return imfs_to_dict(imfs);
        },
        py::arg("x"), py::arg("modes") = 10);
    m.def(
        "eemd",
        [](const Array& x, std::size_t modes, std::size_t ensemble, double ensemble_snr, std::uint64_t seed,
           unsigned threads) {
            const auto cfg = eemd_config(modes, ensemble, ensemble_snr, seed, threads);
            const auto signal = to_signal(x, 1);
            hhta::ImfSet imfs;
            {
                py::gil_scoped_release release;
                imfs = hhta::eemd(signal, cfg);
            }
            return imfs_to_dict(imfs);
        },
        py::arg("x"), py::arg("modes") = 10, py::arg("ensemble") = 50, py::arg("ensemble_snr") = 30.0,
        py::arg("seed") = 0, py::arg("threads") = 0);

    m.def(
        "estimate_alpha",
        [](const Array& x) {
            const auto e = hhta::estimate_alpha(to_vector(x));
            py::dict d;
            d["alpha"] = e.alpha;
            d["nu_alpha"] = e.nu_alpha;
            d["samples"] = e.sample_count;
            d["reliable"] = e.reliable;
            return d;
        },
        py::arg("x"));
    m.def(
        "sample_sas",
        [](double alpha, std::size_t n, std::uint64_t seed) {
            const auto v = hhta::sample_sas(alpha, n, seed);
            return to_array(v);
        },
        py::arg("alpha"), py::arg("n"), py::arg("seed") = 0);

    m.def(
        "enhance",
        [](const Array& x, int rate, std::uint64_t seed, std::size_t frame, std::size_t step, double mu,
           double alpha_min, std::size_t ensemble, double ensemble_snr, std::size_t modes,
           const std::string& threshold_mode, unsigned threads) {
            hhta::EnhanceConfig cfg;
            cfg.eemd = eemd_config(modes, ensemble, ensemble_snr, seed, threads);
            cfg.frame_len = frame;
            cfg.step = step;
            cfg.mu = mu;
            cfg.alpha_min = alpha_min;
            cfg.threshold_combine = hhta::parse_threshold_combine(threshold_mode);
            const auto signal = to_signal(x, rate);
            std::optional<hhta::EnhanceResult> r;
            {
                py::gil_scoped_release release;
                r.emplace(hhta::enhance(signal, cfg));
            }
            const auto& p = r->profile;
            Array alphas({static_cast<py::ssize_t>(p.frames), static_cast<py::ssize_t>(p.modes)});
            std::copy(p.per_mode.begin(), p.per_mode.end(), alphas.mutable_data());
            py::dict profile;
            profile["alpha"] = alphas;
            profile["alpha_u"] = to_array(p.noisy);
            profile["rho"] = to_array(p.thresholds);
            profile["z"] = p.cut_index;
            return py::make_tuple(to_array(r->enhanced.samples()), profile);
        },
        py::arg("x"), py::arg("sample_rate"), py::arg("seed") = 0, py::arg("frame") = 10240, py::arg("step") = 128,
        py::arg("mu") = 0.8, py::arg("alpha_min") = 1.1, py::arg("ensemble") = 50, py::arg("ensemble_snr") = 30.0,
        py::arg("modes") = 10, py::arg("threshold_mode") = "floor", py::arg("threads") = 0,
        "Enhance a noisy signal; returns (enhanced, profile).");

    m.def(
        "llr", [](const Array& c, const Array& p, int rate) { return hhta::llr(to_signal(c, rate), to_signal(p, rate)); },
        py::arg("clean"), py::arg("processed"), py::arg("sample_rate"));
    m.def(
        "fwsnrseg",
        [](const Array& c, const Array& p, int rate) { return hhta::fwsnrseg(to_signal(c, rate), to_signal(p, rate)); },
        py::arg("clean"), py::arg("processed"), py::arg("sample_rate"));
    m.def(
        "stoi", [](const Array& c, const Array& p, int rate) { return hhta::stoi(to_signal(c, rate), to_signal(p, rate)); },
        py::arg("clean"), py::arg("processed"), py::arg("sample_rate"));
    m.def(
        "map_intelligibility",
        [](double d, const std::string& kind) {
            if (kind == "stoi") return hhta::map_intelligibility(d, hhta::kStoiMapping);
            if (kind == "csii") return hhta::map_intelligibility(d, hhta::kCsiiMapping);
            throw std::invalid_argument("kind must be 'stoi' or 'csii'");
        },
        py::arg("d"), py::arg("kind") = "stoi");
}
