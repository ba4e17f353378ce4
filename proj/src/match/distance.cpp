#include "facebench/match/distance.hpp"

#include <algorithm>
#include <cmath>

#include "facebench/core/error.hpp"

namespace facebench::match {

Metric metric_from_name(const std::string& name) {
    if (name == "euclidean") return Metric::Euclidean;
    if (name == "manhattan") return Metric::Manhattan;
    if (name == "cosine") return Metric::Cosine;
    throw RegistryError("unknown metric '" + name + "'; valid: euclidean, manhattan, cosine");
}

std::string metric_name(Metric m) {
    switch (m) {
        case Metric::Euclidean: return "euclidean";
        case Metric::Manhattan: return "manhattan";
        case Metric::Cosine: return "cosine";
    }
    return "?";
}

double pairwise_distance(const std::vector<double>& a, const std::vector<double>& b, Metric metric) {
    if (a.size() != b.size())
        throw ContractViolation("pairwise_distance: dimension mismatch");
    switch (metric) {
        case Metric::Euclidean: {
            double s = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) {
                const double d = a[i] - b[i];
                s += d * d;
            }
            return std::sqrt(s);
        }
        case Metric::Manhattan: {
            double s = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i)
                s += std::abs(a[i] - b[i]);
            return s;
        }
        case Metric::Cosine: {
            double dot = 0.0, na = 0.0, nb = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) {
                dot += a[i] * b[i];
                na += a[i] * a[i];
                nb += b[i] * b[i];
            }
            if (na == 0.0 || nb == 0.0)
                throw ContractViolation("pairwise_distance: cosine undefined for all-zero vector");
            // Clamp guards rounding that would push the distance slightly
            // negative for near-parallel vectors.
            return std::max(0.0, 1.0 - dot / (std::sqrt(na) * std::sqrt(nb)));
        }
    }
    throw ContractViolation("pairwise_distance: bad metric");
}

std::vector<RankedEntry> rank_gallery(
    const std::vector<double>& probe,
    const std::vector<std::pair<std::string, std::vector<double>>>& gallery, Metric metric) {
    if (gallery.empty())
        throw ContractViolation("rank_gallery: gallery must be non-empty");
    std::vector<RankedEntry> out;
    out.reserve(gallery.size());
    for (std::size_t i = 0; i < gallery.size(); ++i)
        out.push_back({gallery[i].first, pairwise_distance(probe, gallery[i].second, metric), i});
    std::stable_sort(out.begin(), out.end(), [](const RankedEntry& l, const RankedEntry& r) {
        if (l.score != r.score) return l.score < r.score;
        return l.enrol_index < r.enrol_index;
    });
    return out;
}

} // namespace facebench::match
