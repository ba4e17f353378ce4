#include <algorithm>
#include <fstream>
#include <memory>
#include <set>

#include <nlohmann/json.hpp>

#include "facebench/core/error.hpp"
#include "facebench/match/classifier.hpp"
#include "model_types.hpp"

namespace facebench::match {

using nlohmann::json;

ClassifierKind classifier_kind_from_name(const std::string& name) {
    if (name == "one_vs_all_margin") return ClassifierKind::OneVsAllMargin;
    if (name == "boosted_softmax") return ClassifierKind::BoostedSoftmax;
    throw RegistryError("unknown classifier kind '" + name +
                              "' (valid: one_vs_all_margin, boosted_softmax)");
}

std::string classifier_kind_name(ClassifierKind kind) {
    return kind == ClassifierKind::OneVsAllMargin ? "one_vs_all_margin" : "boosted_softmax";
}

Prediction Classifier::classify(const std::vector<double>& probe) const {
    const std::vector<double> scores = class_scores(probe);
    std::size_t best = 0;
    for (std::size_t k = 1; k < scores.size(); ++k) {
        if (scores[k] > scores[best]) best = k; // ties keep the lower class index
    }
    return Prediction{labels()[best], scores[best]};
}

std::unique_ptr<Classifier> train_classifier(const std::vector<std::vector<double>>& features,
                                             const std::vector<std::string>& labels,
                                             ClassifierKind kind, const ClassifierHyper& hyper,
                                             std::uint64_t seed) {
    if (features.empty() || features.size() != labels.size()) {
        throw ContractViolation("classifier training needs one label per feature row (got " +
                                      std::to_string(features.size()) + " rows, " +
                                      std::to_string(labels.size()) + " labels)");
    }
    const std::size_t dim = features[0].size();
    if (dim == 0) throw ContractViolation("classifier training features are zero-dimensional");
    for (const std::vector<double>& row : features) {
        if (row.size() != dim) {
            throw ContractViolation("classifier training features have inconsistent widths");
        }
    }
    const std::set<std::string> distinct(labels.begin(), labels.end());
    std::vector<std::string> label_names(distinct.begin(), distinct.end());
    if (label_names.size() < 2) {
        throw ContractViolation("classifier training needs at least 2 identities, got " +
                                      std::to_string(label_names.size()));
    }
    std::vector<int> class_ids(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        class_ids[i] = static_cast<int>(
            std::lower_bound(label_names.begin(), label_names.end(), labels[i]) -
            label_names.begin());
    }
    if (kind == ClassifierKind::OneVsAllMargin) {
        return detail::train_one_vs_all(features, class_ids, label_names, hyper, seed);
    }
    return detail::train_boosted(features, class_ids, label_names, hyper, seed);
}

namespace {

json hyper_to_json(const ClassifierHyper& h) {
    return json{{"margin_c", h.margin_c},
                {"margin_passes", h.margin_passes},
                {"rounds", h.rounds},
                {"max_depth", h.max_depth},
                {"learning_rate", h.learning_rate},
                {"l2_reg", h.l2_reg}};
}

json tree_to_json(const detail::Tree& tree) {
    json nodes = json::array();
    for (const detail::TreeNode& node : tree.nodes) {
        nodes.push_back(json::array({node.feature, node.threshold, node.left, node.right,
                                     node.value}));
    }
    return nodes;
}

detail::Tree tree_from_json(const json& nodes) {
    detail::Tree tree;
    for (const json& entry : nodes) {
        detail::TreeNode node;
        node.feature = entry.at(0).get<int>();
        node.threshold = entry.at(1).get<double>();
        node.left = entry.at(2).get<int>();
        node.right = entry.at(3).get<int>();
        node.value = entry.at(4).get<double>();
        tree.nodes.push_back(node);
    }
    return tree;
}

} // namespace

void save_classifier(const Classifier& clf, const ClassifierHyper& hyper, std::uint64_t seed,
                     const std::string& path) {
    json doc{{"format", "facebench-classifier"},
             {"version", 1},
             {"kind", classifier_kind_name(clf.kind())},
             {"labels", clf.labels()},
             {"dimension", clf.dimension()},
             {"seed", seed},
             {"hyper", hyper_to_json(hyper)}};
    if (clf.kind() == ClassifierKind::OneVsAllMargin) {
        const auto& model = dynamic_cast<const detail::LinearOneVsAll&>(clf);
        doc["model"] = json{{"weights", model.weights}};
    } else {
        const auto& model = dynamic_cast<const detail::BoostedEnsemble&>(clf);
        json rounds = json::array();
        for (const std::vector<detail::Tree>& round : model.rounds) {
            json per_class = json::array();
            for (const detail::Tree& tree : round) per_class.push_back(tree_to_json(tree));
            rounds.push_back(std::move(per_class));
        }
        doc["model"] = json{{"learning_rate", model.learning_rate}, {"rounds", std::move(rounds)}};
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open classifier checkpoint for writing: " + path);
    out << doc.dump();
    if (!out) throw IoError("failed writing classifier checkpoint: " + path);
}

std::unique_ptr<Classifier> load_classifier(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open classifier checkpoint: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& err) {
        throw IoError("classifier checkpoint " + path + " is not valid JSON: " + err.what());
    }
    if (doc.value("format", "") != "facebench-classifier") {
        throw IoError("classifier checkpoint " + path + " has an unrecognized format field");
    }
    const ClassifierKind kind = classifier_kind_from_name(doc.at("kind").get<std::string>());
    auto labels = doc.at("labels").get<std::vector<std::string>>();
    const auto dim = doc.at("dimension").get<std::size_t>();
    if (kind == ClassifierKind::OneVsAllMargin) {
        auto model = std::make_unique<detail::LinearOneVsAll>();
        model->dim = dim;
        model->label_names = std::move(labels);
        model->weights = doc.at("model").at("weights").get<std::vector<std::vector<double>>>();
        return model;
    }
    auto model = std::make_unique<detail::BoostedEnsemble>();
    model->dim = dim;
    model->label_names = std::move(labels);
    model->learning_rate = doc.at("model").at("learning_rate").get<double>();
    for (const json& round : doc.at("model").at("rounds")) {
        std::vector<detail::Tree> per_class;
        for (const json& tree : round) per_class.push_back(tree_from_json(tree));
        model->rounds.push_back(std::move(per_class));
    }
    return model;
}

} // namespace facebench::match
