#ifndef FACEBENCH_MATCH_DISTANCE_HPP
#define FACEBENCH_MATCH_DISTANCE_HPP

#include <string>
#include <vector>

namespace facebench::match {

enum class Metric { Euclidean, Manhattan, Cosine };

Metric metric_from_name(const std::string& name);
std::string metric_name(Metric m);

// euclidean = l2 norm of difference, manhattan = l1, cosine = 1 - a.b/(|a||b|).
// Cosine rejects all-zero vectors.
double pairwise_distance(const std::vector<double>& a, const std::vector<double>& b, Metric metric);

struct RankedEntry {
    std::string identity;
    double score = 0.0;   // distance, lower is better
    std::size_t enrol_index = 0;
};

// Identities sorted by ascending distance; ties broken by ascending enrolment
// index so results never depend on input order.
std::vector<RankedEntry> rank_gallery(const std::vector<double>& probe,
                                      const std::vector<std::pair<std::string, std::vector<double>>>& gallery,
                                      Metric metric);

} // namespace facebench::match

#endif
