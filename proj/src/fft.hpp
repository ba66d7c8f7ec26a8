#pragma once

#include <complex>
#include <span>
#include <vector>

#include <fftw3.h>

namespace hhta::detail {

/// Real-to-complex forward DFT of a fixed size, safe to execute concurrently.
class RealFft {
public:
    explicit RealFft(std::size_t size);
    ~RealFft();
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;

    [[nodiscard]] std::size_t size() const noexcept { return size_; }

    /// Transforms `input` (zero padded to size()) into size()/2 + 1 bins.
    void forward(std::span<const double> input, std::vector<std::complex<double>>& out) const;

    /// Magnitudes of forward(input).
    [[nodiscard]] std::vector<double> magnitude(std::span<const double> input) const;

private:
    std::size_t size_;
    fftw_plan plan_ = nullptr;
};

}  // namespace hhta::detail
