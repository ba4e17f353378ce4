#ifndef FACEBENCH_RUN_TSNE_HPP
#define FACEBENCH_RUN_TSNE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "facebench/embed/pipeline.hpp"

namespace facebench::run {

// Exact (all-pairs) t-SNE for the embedding scatter figure. Small corpora
// only: time and memory are quadratic in the number of records.
struct TsneOptions {
    double perplexity = 12.0;
    int iterations = 500;
    double learning_rate = 100.0;
    double early_exaggeration = 4.0;
    int exaggeration_iterations = 100;
    double initial_momentum = 0.5;
    double final_momentum = 0.8;
    int momentum_switch = 250;
    std::uint64_t seed = 0;
};

// One projected record, carrying the labels a plot colors by.
struct TsnePoint {
    double x = 0.0;
    double y = 0.0;
    std::string identity;
    std::string dataset;
    std::string image_id;
};

// Projects the raw feature vectors to 2-D: Gaussian input affinities with a
// per-point bandwidth found by binary search to match the perplexity,
// symmetrized and exaggerated early, Student-t output affinities, gradient
// descent with momentum and adaptive per-coordinate gains. Deterministic for
// a fixed seed. Throws ContractViolation when fewer than 3 records arrive,
// when dimensions are ragged, or when perplexity >= the number of records.
std::vector<TsnePoint> project_embeddings_2d(const std::vector<embed::EmbeddingRecord>& records,
                                             const TsneOptions& options);

} // namespace facebench::run

#endif
