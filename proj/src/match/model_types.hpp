#ifndef FACEBENCH_MATCH_MODEL_TYPES_HPP
#define FACEBENCH_MATCH_MODEL_TYPES_HPP

// Concrete model representations shared by training, scoring, and checkpoint
// code. Not part of the public surface.

#include <cstdint>
#include <string>
#include <vector>

#include "facebench/match/classifier.hpp"

namespace facebench::match::detail {

// One linear hinge-loss separator per class (class vs rest). The bias lives in
// an augmented constant feature, so weights has dimension + 1 entries per class.
struct LinearOneVsAll final : Classifier {
    std::size_t dim = 0;
    std::vector<std::string> label_names;
    std::vector<std::vector<double>> weights; // [class][dim + 1]

    ClassifierKind kind() const override { return ClassifierKind::OneVsAllMargin; }
    std::size_t dimension() const override { return dim; }
    const std::vector<std::string>& labels() const override { return label_names; }
    std::vector<double> class_scores(const std::vector<double>& probe) const override;
};

struct TreeNode {
    // Interior node when feature >= 0, leaf otherwise.
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
};

struct Tree {
    std::vector<TreeNode> nodes; // nodes[0] is the root
    double predict(const std::vector<double>& x) const;
};

// Additive softmax model: per boosting round, one regression tree per class.
struct BoostedEnsemble final : Classifier {
    std::size_t dim = 0;
    std::vector<std::string> label_names;
    double learning_rate = 0.1;
    std::vector<std::vector<Tree>> rounds; // [round][class]

    ClassifierKind kind() const override { return ClassifierKind::BoostedSoftmax; }
    std::size_t dimension() const override { return dim; }
    const std::vector<std::string>& labels() const override { return label_names; }
    std::vector<double> class_scores(const std::vector<double>& probe) const override;
    std::vector<double> raw_scores(const std::vector<double>& probe) const;
};

std::vector<double> softmax(const std::vector<double>& logits);

} // namespace facebench::match::detail

#endif
