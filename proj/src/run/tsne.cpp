#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "facebench/core/error.hpp"
#include "facebench/core/rng.hpp"
#include "facebench/run/tsne.hpp"

namespace facebench::run {

namespace {

// Conditional affinities for one point: p_{j|i} over squared distances with
// the precision (1 / 2 sigma^2) found by binary search so that the
// distribution's perplexity matches the target.
void conditional_affinities(const std::vector<double>& sq_dist, std::size_t self,
                            double log_perplexity, std::vector<double>& p_out) {
    const std::size_t n = sq_dist.size();
    double beta = 1.0;
    double beta_min = -std::numeric_limits<double>::infinity();
    double beta_max = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 64; ++iter) {
        double sum_p = 0.0;
        double sum_pd = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double p = j == self ? 0.0 : std::exp(-beta * sq_dist[j]);
            p_out[j] = p;
            sum_p += p;
            sum_pd += p * sq_dist[j];
        }
        if (sum_p <= 0.0) {
            // Bandwidth collapsed; widen and retry.
            beta_max = beta;
            beta = std::isinf(beta_min) ? beta / 2.0 : (beta + beta_min) / 2.0;
            continue;
        }
        const double entropy = std::log(sum_p) + beta * sum_pd / sum_p;
        const double diff = entropy - log_perplexity;
        if (std::abs(diff) < 1e-7) break;
        if (diff > 0.0) {
            beta_min = beta;
            beta = std::isinf(beta_max) ? beta * 2.0 : (beta + beta_max) / 2.0;
        } else {
            beta_max = beta;
            beta = std::isinf(beta_min) ? beta / 2.0 : (beta + beta_min) / 2.0;
        }
    }
    double sum_p = 0.0;
    for (double p : p_out) sum_p += p;
    if (sum_p <= 0.0) {
        // Degenerate neighborhood (all distances identical at the search
        // floor): fall back to uniform affinities.
        const double uniform = 1.0 / static_cast<double>(n - 1);
        for (std::size_t j = 0; j < n; ++j) p_out[j] = j == self ? 0.0 : uniform;
        return;
    }
    for (double& p : p_out) p /= sum_p;
}

} // namespace

std::vector<TsnePoint> project_embeddings_2d(const std::vector<embed::EmbeddingRecord>& records,
                                             const TsneOptions& options) {
    const std::size_t n = records.size();
    if (n < 3) throw ContractViolation("t-SNE needs at least 3 records");
    if (!(options.perplexity > 0.0))
        throw ContractViolation("t-SNE perplexity must be positive");
    if (options.perplexity >= static_cast<double>(n))
        throw ContractViolation("t-SNE perplexity must be smaller than the number of records");
    const std::size_t dim = records.front().vector.size();
    for (const embed::EmbeddingRecord& rec : records)
        if (rec.vector.size() != dim)
            throw ContractViolation("t-SNE input vectors must share one dimension");

    // Pairwise squared Euclidean distances in feature space.
    std::vector<std::vector<double>> sq_dist(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double d = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
                const double diff = records[i].vector[k] - records[j].vector[k];
                d += diff * diff;
            }
            sq_dist[i][j] = sq_dist[j][i] = d;
        }

    // Symmetrized input affinities.
    const double log_perplexity = std::log(options.perplexity);
    std::vector<std::vector<double>> p(n, std::vector<double>(n, 0.0));
    {
        std::vector<double> row(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            conditional_affinities(sq_dist[i], i, log_perplexity, row);
            for (std::size_t j = 0; j < n; ++j) p[i][j] = row[j];
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = (p[i][j] + p[j][i]) / (2.0 * static_cast<double>(n));
            p[i][j] = p[j][i] = std::max(v, 1e-12);
        }
    for (std::size_t i = 0; i < n; ++i) p[i][i] = 0.0;

    // Seeded small-scale Gaussian start.
    Rng rng(options.seed);
    std::vector<double> y(2 * n);
    for (double& v : y) v = 1e-4 * rng.gaussian();

    std::vector<double> velocity(2 * n, 0.0);
    std::vector<double> gain(2 * n, 1.0);
    std::vector<double> grad(2 * n, 0.0);
    std::vector<std::vector<double>> q_num(n, std::vector<double>(n, 0.0));

    for (int iter = 0; iter < options.iterations; ++iter) {
        const double exaggeration =
            iter < options.exaggeration_iterations ? options.early_exaggeration : 1.0;
        double q_sum = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const double dx = y[2 * i] - y[2 * j];
                const double dy = y[2 * i + 1] - y[2 * j + 1];
                const double num = 1.0 / (1.0 + dx * dx + dy * dy);
                q_num[i][j] = q_num[j][i] = num;
                q_sum += 2.0 * num;
            }
        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                const double q = std::max(q_num[i][j] / q_sum, 1e-12);
                const double coeff = 4.0 * (exaggeration * p[i][j] - q) * q_num[i][j];
                grad[2 * i] += coeff * (y[2 * i] - y[2 * j]);
                grad[2 * i + 1] += coeff * (y[2 * i + 1] - y[2 * j + 1]);
            }
        const double momentum =
            iter < options.momentum_switch ? options.initial_momentum : options.final_momentum;
        for (std::size_t k = 0; k < 2 * n; ++k) {
            const bool signs_differ = (grad[k] > 0.0) != (velocity[k] > 0.0);
            gain[k] = signs_differ ? gain[k] + 0.2 : gain[k] * 0.8;
            gain[k] = std::max(gain[k], 0.01);
            velocity[k] = momentum * velocity[k] - options.learning_rate * gain[k] * grad[k];
            y[k] += velocity[k];
        }
        // Keep the embedding centered so runs are comparable.
        double mean_x = 0.0;
        double mean_y = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mean_x += y[2 * i];
            mean_y += y[2 * i + 1];
        }
        mean_x /= static_cast<double>(n);
        mean_y /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[2 * i] -= mean_x;
            y[2 * i + 1] -= mean_y;
        }
    }

    std::vector<TsnePoint> points;
    points.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        points.push_back(
            {y[2 * i], y[2 * i + 1], records[i].identity, records[i].dataset, records[i].image_id});
    return points;
}

} // namespace facebench::run
