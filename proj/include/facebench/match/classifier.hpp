#ifndef FACEBENCH_MATCH_CLASSIFIER_HPP
#define FACEBENCH_MATCH_CLASSIFIER_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace facebench::match {

enum class ClassifierKind { OneVsAllMargin, BoostedSoftmax };

ClassifierKind classifier_kind_from_name(const std::string& name);
std::string classifier_kind_name(ClassifierKind kind);

struct ClassifierHyper {
    // one_vs_all_margin: linear max-margin, hinge loss
    double margin_c = 1.0;
    int margin_passes = 200;
    // boosted_softmax: tree ensemble
    int rounds = 200;
    int max_depth = 4;
    double learning_rate = 0.1;
    double l2_reg = 1.0;
};

struct Prediction {
    std::string identity;
    double confidence = 0.0;
};

// Trained multi-class identity model. class_scores returns one confidence per
// label (signed margins for one_vs_all, softmax probabilities for boosted);
// classify takes the argmax with ties broken by ascending class index.
class Classifier {
public:
    virtual ~Classifier() = default;
    virtual ClassifierKind kind() const = 0;
    virtual std::size_t dimension() const = 0;
    virtual const std::vector<std::string>& labels() const = 0;
    virtual std::vector<double> class_scores(const std::vector<double>& probe) const = 0;

    Prediction classify(const std::vector<double>& probe) const;
};

// Requires >= 2 classes with >= 1 sample each; features are expected to be
// min-max scaled already. Training is deterministic for a fixed seed.
std::unique_ptr<Classifier> train_classifier(const std::vector<std::vector<double>>& features,
                                             const std::vector<std::string>& labels,
                                             ClassifierKind kind, const ClassifierHyper& hyper,
                                             std::uint64_t seed);

void save_classifier(const Classifier& clf, const ClassifierHyper& hyper, std::uint64_t seed,
                     const std::string& path);
std::unique_ptr<Classifier> load_classifier(const std::string& path);

// Internals shared by the two kinds and the checkpoint loader.
namespace detail {

struct LinearOneVsAll;
struct BoostedEnsemble;

std::unique_ptr<Classifier> train_one_vs_all(const std::vector<std::vector<double>>& features,
                                             const std::vector<int>& class_ids,
                                             const std::vector<std::string>& label_names,
                                             const ClassifierHyper& hyper, std::uint64_t seed);
std::unique_ptr<Classifier> train_boosted(const std::vector<std::vector<double>>& features,
                                          const std::vector<int>& class_ids,
                                          const std::vector<std::string>& label_names,
                                          const ClassifierHyper& hyper, std::uint64_t seed);

} // namespace detail

} // namespace facebench::match

#endif
