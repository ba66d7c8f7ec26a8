#include "hhta/stable.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>

#include "hhta/parallel.hpp"
#include "hhta/seeding.hpp"
#include "hhta/signal.hpp"

namespace hhta {

std::string to_string(LookupProvenance p) {
    return p == LookupProvenance::published_table ? "published-table" : "monte-carlo";
}

AlphaLookup::AlphaLookup(std::vector<Entry> entries, LookupProvenance provenance, std::string note)
    : entries_(std::move(entries)), provenance_(provenance), note_(std::move(note)) {
    if (entries_.empty()) throw std::invalid_argument("AlphaLookup: table is empty");
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        if (!(e.alpha >= kMinAlpha && e.alpha <= kMaxAlpha) || !std::isfinite(e.nu)) {
            throw std::invalid_argument("AlphaLookup: entry out of domain at alpha " + std::to_string(e.alpha));
        }
        if (i > 0 && !(e.alpha > entries_[i - 1].alpha)) {
            throw std::invalid_argument("AlphaLookup: alpha grid must be strictly increasing");
        }
        if (i > 0 && !(e.nu < entries_[i - 1].nu)) {
            throw std::invalid_argument("AlphaLookup: nu is not strictly decreasing in alpha near alpha " +
                                        std::to_string(e.alpha));
        }
    }
}

double AlphaLookup::alpha_for(double nu) const {
    if (std::isnan(nu)) throw std::invalid_argument("AlphaLookup: nu is NaN");
    if (nu >= entries_.front().nu) return entries_.front().alpha;
    if (nu <= entries_.back().nu) return entries_.back().alpha;
    // First entry whose nu is <= the query; the segment is [hi - 1, hi].
    const auto hi = std::partition_point(entries_.begin(), entries_.end(),
                                         [&](const Entry& e) { return e.nu > nu; });
    const auto lo = hi - 1;
    const double t = (lo->nu - nu) / (lo->nu - hi->nu);
    return lo->alpha + t * (hi->alpha - lo->alpha);
}

std::string AlphaLookup::to_text() const {
    std::ostringstream out;
    out << "# provenance: " << to_string(provenance_);
    if (!note_.empty()) out << ' ' << note_;
    out << '\n';
    out << std::setprecision(10);
    for (const auto& e : entries_) out << e.alpha << ' ' << e.nu << '\n';
    return out.str();
}

AlphaLookup AlphaLookup::from_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::optional<LookupProvenance> provenance;
    std::string note;
    std::vector<Entry> entries;
    const std::string tag = "# provenance:";
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.starts_with(tag)) {
            std::istringstream header(line.substr(tag.size()));
            std::string name;
            header >> name;
            if (name == "published-table") provenance = LookupProvenance::published_table;
            else if (name == "monte-carlo") provenance = LookupProvenance::monte_carlo;
            else throw FormatError("AlphaLookup: unknown provenance '" + name + "'");
            std::getline(header >> std::ws, note);
            continue;
        }
        if (line.front() == '#') continue;
        std::istringstream row(line);
        Entry e{};
        if (!(row >> e.alpha >> e.nu)) throw FormatError("AlphaLookup: malformed row '" + line + "'");
        entries.push_back(e);
    }
    if (!provenance) throw FormatError("AlphaLookup: missing '# provenance:' header line");
    return AlphaLookup(std::move(entries), *provenance, std::move(note));
}

AlphaLookup AlphaLookup::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("AlphaLookup: cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_text(buf.str());
}

void AlphaLookup::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("AlphaLookup: cannot write " + path.string());
    out << to_text();
}

std::vector<double> quantiles(std::span<const double> samples, std::span<const double> ps) {
    if (samples.empty()) throw std::invalid_argument("quantile: empty sample");
    const std::size_t n = samples.size();
    const double dn = static_cast<double>(n);

    struct Plan {
        std::size_t lo;
        double frac;
    };
    std::vector<Plan> plans;
    std::vector<std::size_t> ranks;
    for (double p : ps) {
        if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("quantile: p must lie in (0, 1)");
        // 1-based fractional rank of p under positions (i - 0.5) / n.
        const double r = p * dn + 0.5;
        Plan plan{};
        if (r <= 1.0) {
            plan = {0, 0.0};
        } else if (r >= dn) {
            plan = {n - 1, 0.0};
        } else {
            const double fl = std::floor(r);
            plan = {static_cast<std::size_t>(fl) - 1, r - fl};
        }
        plans.push_back(plan);
        ranks.push_back(plan.lo);
        if (plan.frac > 0.0) ranks.push_back(plan.lo + 1);
    }
    std::sort(ranks.begin(), ranks.end());
    ranks.erase(std::unique(ranks.begin(), ranks.end()), ranks.end());

    std::vector<double> v(samples.begin(), samples.end());
    std::size_t begin = 0;
    for (std::size_t r : ranks) {
        std::nth_element(v.begin() + static_cast<std::ptrdiff_t>(begin),
                         v.begin() + static_cast<std::ptrdiff_t>(r), v.end());
        begin = r + 1;
    }
    std::vector<double> out;
    out.reserve(plans.size());
    for (const auto& plan : plans) {
        const double a = v[plan.lo];
        out.push_back(plan.frac > 0.0 ? a + plan.frac * (v[plan.lo + 1] - a) : a);
    }
    return out;
}

double quantile(std::span<const double> samples, double p) {
    const double ps[] = {p};
    return quantiles(samples, ps).front();
}

double nu_alpha(std::span<const double> samples) {
    static constexpr double kProbs[] = {0.05, 0.25, 0.75, 0.95};
    const auto q = quantiles(samples, kProbs);
    const double iqr = q[2] - q[1];
    if (!(iqr > 0.0)) throw DegenerateInputError("nu_alpha: zero interquartile range");
    return (q[3] - q[0]) / iqr;
}

AlphaEstimate estimate_alpha(std::span<const double> samples, const AlphaLookup& lookup) {
    AlphaEstimate est;
    est.sample_count = samples.size();
    est.reliable = samples.size() >= kMinReliableSamples;
    est.nu_alpha = nu_alpha(samples);
    est.alpha = std::clamp(lookup.alpha_for(est.nu_alpha), kMinAlpha, kMaxAlpha);
    return est;
}

AlphaEstimate estimate_alpha(std::span<const double> samples) {
    return estimate_alpha(samples, default_lookup());
}

std::vector<double> sample_sas(double alpha, std::size_t n, std::uint64_t seed) {
    if (!(alpha > 0.0 && alpha <= 2.0)) {
        throw std::invalid_argument("sample_sas: alpha must lie in (0, 2], got " + std::to_string(alpha));
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> out(n);
    const double inv_alpha = 1.0 / alpha;
    const double tail_exp = (1.0 - alpha) / alpha;
    for (auto& x : out) {
        double u = 0.0;
        double cos_u = 0.0;
        do {
            u = std::numbers::pi * (unit(rng) - 0.5);
            cos_u = std::cos(u);
        } while (!(cos_u > 0.0));
        double w = 0.0;
        do {
            w = -std::log(1.0 - unit(rng));
        } while (!(w > 0.0));
        if (alpha == 1.0) {
            x = std::tan(u);
        } else {
            x = std::sin(alpha * u) / std::pow(cos_u, inv_alpha) *
                std::pow(std::cos(u - alpha * u) / w, tail_exp);
        }
    }
    return out;
}

AlphaLookup build_lookup(std::span<const double> alphas, std::size_t per_point_n, std::size_t trials,
                         std::uint64_t seed, unsigned threads) {
    if (alphas.empty()) throw std::invalid_argument("build_lookup: empty alpha grid");
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        if (!(alphas[i] >= kMinAlpha && alphas[i] <= kMaxAlpha)) {
            throw std::invalid_argument("build_lookup: alpha grid must lie within [0.5, 2]");
        }
        if (i > 0 && !(alphas[i] > alphas[i - 1])) {
            throw std::invalid_argument("build_lookup: alpha grid must be strictly increasing");
        }
    }
    if (per_point_n < kMinReliableSamples) throw std::invalid_argument("build_lookup: per_point_n too small");
    if (trials < 1) throw std::invalid_argument("build_lookup: trials must be >= 1");

    std::vector<double> nus(alphas.size() * trials);
    parallel_for(nus.size(), threads, [&](std::size_t task) {
        const std::size_t point = task / trials;
        const std::size_t trial = task % trials;
        const auto draws = sample_sas(alphas[point], per_point_n, mix_seed(mix_seed(seed, point), trial));
        nus[task] = nu_alpha(draws);
    });

    std::vector<AlphaLookup::Entry> entries;
    for (std::size_t point = 0; point < alphas.size(); ++point) {
        double sum = 0.0;
        for (std::size_t t = 0; t < trials; ++t) sum += nus[point * trials + t];
        entries.push_back({alphas[point], sum / static_cast<double>(trials)});
    }
    std::ostringstream note;
    note << "n=" << per_point_n << " trials=" << trials << " seed=" << seed;
    try {
        return AlphaLookup(std::move(entries), LookupProvenance::monte_carlo, note.str());
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string("build_lookup: configuration error: ") + e.what());
    }
}

}  // namespace hhta
