#include "fft.hpp"

#include <algorithm>
#include <mutex>
#include <stdexcept>

namespace hhta::detail {
namespace {

// FFTW's planner is not reentrant.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

RealFft::RealFft(std::size_t size) : size_(size) {
    if (size == 0) throw std::invalid_argument("RealFft: size must be positive");
    std::vector<double> in(size);
    std::vector<std::complex<double>> out(size / 2 + 1);
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(size), in.data(),
                                 reinterpret_cast<fftw_complex*>(out.data()),
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan_ == nullptr) throw std::runtime_error("RealFft: FFTW planning failed");
}

RealFft::~RealFft() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
}

void RealFft::forward(std::span<const double> input, std::vector<std::complex<double>>& out) const {
    std::vector<double> in(size_, 0.0);
    std::copy_n(input.begin(), std::min(input.size(), size_), in.begin());
    out.resize(size_ / 2 + 1);
    fftw_execute_dft_r2c(plan_, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
}

std::vector<double> RealFft::magnitude(std::span<const double> input) const {
    std::vector<std::complex<double>> spec;
    forward(input, spec);
    std::vector<double> mag(spec.size());
    std::transform(spec.begin(), spec.end(), mag.begin(), [](auto c) { return std::abs(c); });
    return mag;
}

}  // namespace hhta::detail
