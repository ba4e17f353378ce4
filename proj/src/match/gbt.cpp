#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "facebench/core/error.hpp"
#include "model_types.hpp"

namespace facebench::match::detail {

double Tree::predict(const std::vector<double>& x) const {
    int at = 0;
    while (nodes[at].feature >= 0) {
        const TreeNode& node = nodes[at];
        at = x[static_cast<std::size_t>(node.feature)] < node.threshold ? node.left : node.right;
    }
    return nodes[at].value;
}

std::vector<double> softmax(const std::vector<double>& logits) {
    double peak = logits[0];
    for (double v : logits) peak = std::max(peak, v);
    std::vector<double> out(logits.size());
    double total = 0.0;
    for (std::size_t k = 0; k < logits.size(); ++k) {
        out[k] = std::exp(logits[k] - peak);
        total += out[k];
    }
    for (double& v : out) v /= total;
    return out;
}

std::vector<double> BoostedEnsemble::raw_scores(const std::vector<double>& probe) const {
    if (probe.size() != dim) {
        throw ContractViolation("classifier probe has dimension " +
                                      std::to_string(probe.size()) + ", model expects " +
                                      std::to_string(dim));
    }
    std::vector<double> logits(label_names.size(), 0.0);
    for (const std::vector<Tree>& round : rounds) {
        for (std::size_t k = 0; k < round.size(); ++k) {
            logits[k] += learning_rate * round[k].predict(probe);
        }
    }
    return logits;
}

std::vector<double> BoostedEnsemble::class_scores(const std::vector<double>& probe) const {
    return softmax(raw_scores(probe));
}

namespace {

struct SplitChoice {
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;
};

double leaf_objective(double g, double h, double l2) { return g * g / (h + l2); }

// Exact greedy split search: every feature, every boundary between distinct
// sorted values. Features are scanned in index order and a candidate replaces
// the incumbent only on strictly larger gain, so the choice is deterministic.
SplitChoice best_split(const std::vector<std::vector<double>>& features,
                       const std::vector<std::size_t>& members, const std::vector<double>& grad,
                       const std::vector<double>& hess, double l2) {
    double g_total = 0.0;
    double h_total = 0.0;
    for (std::size_t i : members) {
        g_total += grad[i];
        h_total += hess[i];
    }
    const double base = leaf_objective(g_total, h_total, l2);
    SplitChoice best;
    const std::size_t dim = features[0].size();
    std::vector<std::size_t> order(members);
    for (std::size_t d = 0; d < dim; ++d) {
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const double va = features[a][d];
            const double vb = features[b][d];
            return va != vb ? va < vb : a < b;
        });
        double g_left = 0.0;
        double h_left = 0.0;
        for (std::size_t j = 0; j + 1 < order.size(); ++j) {
            g_left += grad[order[j]];
            h_left += hess[order[j]];
            const double lo = features[order[j]][d];
            const double hi = features[order[j + 1]][d];
            if (lo == hi) continue;
            const double gain = 0.5 * (leaf_objective(g_left, h_left, l2) +
                                       leaf_objective(g_total - g_left, h_total - h_left, l2) -
                                       base);
            if (gain > best.gain + 1e-12) {
                best.gain = gain;
                best.feature = static_cast<int>(d);
                best.threshold = lo + 0.5 * (hi - lo);
            }
        }
    }
    return best;
}

void grow_node(Tree& tree, int node_index, const std::vector<std::vector<double>>& features,
               std::vector<std::size_t> members, const std::vector<double>& grad,
               const std::vector<double>& hess, double l2, int depth, int max_depth) {
    double g_total = 0.0;
    double h_total = 0.0;
    for (std::size_t i : members) {
        g_total += grad[i];
        h_total += hess[i];
    }
    SplitChoice split;
    if (depth < max_depth && members.size() >= 2) {
        split = best_split(features, members, grad, hess, l2);
    }
    if (split.feature < 0) {
        tree.nodes[node_index].value = -g_total / (h_total + l2);
        return;
    }
    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (std::size_t i : members) {
        (features[i][static_cast<std::size_t>(split.feature)] < split.threshold ? left : right)
            .push_back(i);
    }
    tree.nodes[node_index].feature = split.feature;
    tree.nodes[node_index].threshold = split.threshold;
    tree.nodes[node_index].left = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes[node_index].right = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    grow_node(tree, tree.nodes[node_index].left, features, std::move(left), grad, hess, l2,
              depth + 1, max_depth);
    grow_node(tree, tree.nodes[node_index].right, features, std::move(right), grad, hess, l2,
              depth + 1, max_depth);
}

Tree fit_tree(const std::vector<std::vector<double>>& features, const std::vector<double>& grad,
              const std::vector<double>& hess, double l2, int max_depth) {
    Tree tree;
    tree.nodes.emplace_back();
    std::vector<std::size_t> all(features.size());
    std::iota(all.begin(), all.end(), 0);
    grow_node(tree, 0, features, std::move(all), grad, hess, l2, 0, max_depth);
    return tree;
}

} // namespace

std::unique_ptr<Classifier> train_boosted(const std::vector<std::vector<double>>& features,
                                          const std::vector<int>& class_ids,
                                          const std::vector<std::string>& label_names,
                                          const ClassifierHyper& hyper, std::uint64_t /*seed*/) {
    const std::size_t n = features.size();
    const std::size_t n_classes = label_names.size();
    auto model = std::make_unique<BoostedEnsemble>();
    model->dim = features[0].size();
    model->label_names = label_names;
    model->learning_rate = hyper.learning_rate;

    std::vector<std::vector<double>> logits(n, std::vector<double>(n_classes, 0.0));
    std::vector<double> grad(n, 0.0);
    std::vector<double> hess(n, 0.0);
    for (int round = 0; round < hyper.rounds; ++round) {
        std::vector<Tree> per_class;
        per_class.reserve(n_classes);
        for (std::size_t k = 0; k < n_classes; ++k) {
            for (std::size_t i = 0; i < n; ++i) {
                const std::vector<double> p = softmax(logits[i]);
                grad[i] = p[k] - (class_ids[i] == static_cast<int>(k) ? 1.0 : 0.0);
                hess[i] = std::max(p[k] * (1.0 - p[k]), 1e-6);
            }
            per_class.push_back(fit_tree(features, grad, hess, hyper.l2_reg, hyper.max_depth));
        }
        for (std::size_t k = 0; k < n_classes; ++k) {
            for (std::size_t i = 0; i < n; ++i) {
                logits[i][k] += hyper.learning_rate * per_class[k].predict(features[i]);
            }
        }
        model->rounds.push_back(std::move(per_class));
    }
    return model;
}

} // namespace facebench::match::detail
