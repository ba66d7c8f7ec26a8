#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace hhta {

/// Sample-count floor below which an alpha estimate is flagged unreliable.
inline constexpr std::size_t kMinReliableSamples = 100;

/// Quantile ratio of a Gaussian sample, the alpha = 2 end of the lookup.
inline constexpr double kGaussianNuAlpha = 2.439;

inline constexpr double kMinAlpha = 0.5;
inline constexpr double kMaxAlpha = 2.0;

struct AlphaEstimate {
    double alpha = kMaxAlpha;
    double nu_alpha = kGaussianNuAlpha;
    std::size_t sample_count = 0;
    bool reliable = false;
};

enum class LookupProvenance { published_table, monte_carlo };

/// Symmetric-case mapping between the characteristic exponent and the
/// quantile ratio nu = (x95 - x05) / (x75 - x25). Entries are sorted by
/// increasing alpha and strictly decreasing nu.
class AlphaLookup {
public:
    struct Entry {
        double alpha;
        double nu;
    };

    AlphaLookup(std::vector<Entry> entries, LookupProvenance provenance, std::string note = {});

    [[nodiscard]] std::span<const Entry> entries() const noexcept { return entries_; }
    [[nodiscard]] LookupProvenance provenance() const noexcept { return provenance_; }
    [[nodiscard]] const std::string& note() const noexcept { return note_; }

    /// Inverse interpolation nu -> alpha, clamped to the table's alpha range.
    [[nodiscard]] double alpha_for(double nu) const;

    /// Text form: one `# provenance: <tag> <note>` line, then "alpha nu" rows.
    [[nodiscard]] std::string to_text() const;
    static AlphaLookup from_text(const std::string& text);
    static AlphaLookup load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

private:
    std::vector<Entry> entries_;
    LookupProvenance provenance_;
    std::string note_;
};

/// The lookup table shipped with the library.
const AlphaLookup& default_lookup();

/// Order-statistic quantile, linear interpolation between plotting positions
/// (i - 0.5) / n; clamped to the sample min/max outside them.
double quantile(std::span<const double> samples, double p);

/// Several quantiles at once, sharing a single selection pass.
std::vector<double> quantiles(std::span<const double> samples, std::span<const double> ps);

/// McCulloch's quantile ratio (x95 - x05) / (x75 - x25).
/// Throws DegenerateInputError when the interquartile range is zero.
double nu_alpha(std::span<const double> samples);

AlphaEstimate estimate_alpha(std::span<const double> samples, const AlphaLookup& lookup);
AlphaEstimate estimate_alpha(std::span<const double> samples);

/// Standard symmetric alpha-stable variates via Chambers-Mallows-Stuck.
/// alpha = 2 yields N(0, 2); alpha = 1 yields standard Cauchy.
std::vector<double> sample_sas(double alpha, std::size_t n, std::uint64_t seed);

/// Monte Carlo lookup: for every grid alpha, nu averaged over `trials`
/// independent sample sets of size `per_point_n`.
AlphaLookup build_lookup(std::span<const double> alphas, std::size_t per_point_n, std::size_t trials,
                         std::uint64_t seed, unsigned threads = 0);

std::string to_string(LookupProvenance p);

}  // namespace hhta
