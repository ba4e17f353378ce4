#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <vector>

#include <doctest.h>

#include "facebench/core/error.hpp"
#include "facebench/core/rng.hpp"
#include "facebench/match/classifier.hpp"
#include "facebench/match/distance.hpp"

using namespace facebench;
using namespace facebench::match;

namespace {

std::vector<double> random_vector(Rng& rng, std::size_t dim) {
    std::vector<double> v(dim);
    for (double& x : v) x = rng.uniform(-1.0, 1.0);
    return v;
}

// Separable toy set from the training contract: two tight clusters far apart.
struct ToySet {
    std::vector<std::vector<double>> features = {{0, 0}, {0, 1}, {5, 5}, {5, 6}};
    std::vector<std::string> labels = {"A", "A", "B", "B"};
};

} // namespace

TEST_CASE("distance formulas match the closed forms") {
    CHECK(pairwise_distance({0, 0}, {3, 4}, Metric::Euclidean) == doctest::Approx(5.0));
    CHECK(pairwise_distance({0, 0}, {3, 4}, Metric::Manhattan) == doctest::Approx(7.0));
    CHECK(pairwise_distance({1, 0}, {0, 1}, Metric::Cosine) == doctest::Approx(1.0));
    CHECK(pairwise_distance({1, 1}, {2, 2}, Metric::Cosine) == doctest::Approx(0.0));
}

TEST_CASE("distance preconditions are enforced") {
    CHECK_THROWS_AS(pairwise_distance({1, 2}, {1, 2, 3}, Metric::Euclidean), ContractViolation);
    CHECK_THROWS_AS(pairwise_distance({0, 0}, {1, 1}, Metric::Cosine), ContractViolation);
    CHECK_THROWS_AS(metric_from_name("chebyshev"), RegistryError);
    CHECK(metric_from_name("euclidean") == Metric::Euclidean);
    CHECK(metric_name(Metric::Cosine) == "cosine");
}

TEST_CASE("metric axioms hold on random samples") {
    Rng rng(404);
    for (int trial = 0; trial < 50; ++trial) {
        const std::vector<double> a = random_vector(rng, 6);
        const std::vector<double> b = random_vector(rng, 6);
        const std::vector<double> c = random_vector(rng, 6);
        for (Metric m : {Metric::Euclidean, Metric::Manhattan, Metric::Cosine}) {
            CHECK(pairwise_distance(a, b, m) == doctest::Approx(pairwise_distance(b, a, m)));
            CHECK(pairwise_distance(a, a, m) == doctest::Approx(0.0).epsilon(1e-9));
            CHECK(pairwise_distance(a, b, m) >= -1e-12);
        }
        for (Metric m : {Metric::Euclidean, Metric::Manhattan}) {
            CHECK(pairwise_distance(a, c, m) <=
                  pairwise_distance(a, b, m) + pairwise_distance(b, c, m) + 1e-9);
        }
    }
}

TEST_CASE("rank_gallery puts an exact match first with score zero") {
    const std::vector<std::pair<std::string, std::vector<double>>> gallery = {
        {"ana", {1, 1}}, {"ben", {4, 0}}, {"cyn", {0, 3}}};
    const auto ranked = rank_gallery({4, 0}, gallery, Metric::Euclidean);
    REQUIRE(ranked.size() == 3);
    CHECK(ranked[0].identity == "ben");
    CHECK(ranked[0].score == doctest::Approx(0.0));
}

TEST_CASE("rank_gallery breaks ties by enrolment index") {
    const std::vector<std::pair<std::string, std::vector<double>>> gallery = {
        {"late", {1, 0}}, {"early", {0, 1}}, {"other", {5, 5}}};
    // Probe equidistant from the first two entries.
    const auto ranked = rank_gallery({0, 0}, gallery, Metric::Euclidean);
    CHECK(ranked[0].identity == "late"); // index 0 wins the tie
    CHECK(ranked[0].enrol_index == 0);
    CHECK(ranked[1].identity == "early");
}

TEST_CASE("rank_gallery equals an exhaustive sort oracle and ignores input order") {
    Rng rng(555);
    std::vector<std::pair<std::string, std::vector<double>>> gallery;
    for (int i = 0; i < 5; ++i) {
        gallery.push_back({"id" + std::to_string(i), random_vector(rng, 4)});
    }
    const std::vector<double> probe = random_vector(rng, 4);
    const auto ranked = rank_gallery(probe, gallery, Metric::Manhattan);

    std::vector<std::pair<double, std::string>> oracle;
    for (const auto& [name, vec] : gallery) {
        double d = 0.0;
        for (std::size_t k = 0; k < vec.size(); ++k) d += std::fabs(vec[k] - probe[k]);
        oracle.push_back({d, name});
    }
    std::sort(oracle.begin(), oracle.end());
    REQUIRE(ranked.size() == oracle.size());
    for (std::size_t i = 0; i < oracle.size(); ++i) {
        CHECK(ranked[i].identity == oracle[i].second);
        CHECK(ranked[i].score == doctest::Approx(oracle[i].first));
    }

    CHECK_THROWS_AS(rank_gallery(probe, {}, Metric::Euclidean), ContractViolation);
}

TEST_CASE("both classifier kinds separate the toy set perfectly") {
    const ToySet toy;
    ClassifierHyper hyper;
    hyper.rounds = 20; // plenty for two clusters
    for (ClassifierKind kind : {ClassifierKind::OneVsAllMargin, ClassifierKind::BoostedSoftmax}) {
        const auto clf = train_classifier(toy.features, toy.labels, kind, hyper, 7);
        for (std::size_t i = 0; i < toy.features.size(); ++i) {
            const Prediction pred = clf->classify(toy.features[i]);
            CHECK(pred.identity == toy.labels[i]);
        }
        // Probe on a training sample of class A: confident and correct.
        const Prediction a = clf->classify({0, 0});
        CHECK(a.identity == "A");
        CHECK(a.confidence > 0.0);
    }
}

TEST_CASE("training is deterministic for a fixed seed") {
    const ToySet toy;
    ClassifierHyper hyper;
    hyper.rounds = 10;
    for (ClassifierKind kind : {ClassifierKind::OneVsAllMargin, ClassifierKind::BoostedSoftmax}) {
        const auto one = train_classifier(toy.features, toy.labels, kind, hyper, 99);
        const auto two = train_classifier(toy.features, toy.labels, kind, hyper, 99);
        Rng rng(11);
        for (int i = 0; i < 20; ++i) {
            const std::vector<double> probe = {rng.uniform(-1, 7), rng.uniform(-1, 7)};
            CHECK(one->class_scores(probe) == two->class_scores(probe));
        }
    }
}

TEST_CASE("classifier training rejects degenerate inputs") {
    ClassifierHyper hyper;
    CHECK_THROWS_AS(train_classifier({{1, 2}, {3, 4}}, {"solo", "solo"},
                                     ClassifierKind::OneVsAllMargin, hyper, 1),
                    ContractViolation);
    CHECK_THROWS_AS(train_classifier({{1, 2}}, {"a", "b"}, ClassifierKind::OneVsAllMargin, hyper, 1),
                    ContractViolation);
    CHECK_THROWS_AS(train_classifier({{1, 2}, {3}}, {"a", "b"}, ClassifierKind::OneVsAllMargin,
                                     hyper, 1),
                    ContractViolation);
    const ToySet toy;
    const auto clf =
        train_classifier(toy.features, toy.labels, ClassifierKind::OneVsAllMargin, hyper, 1);
    CHECK_THROWS_AS(clf->class_scores({1, 2, 3}), ContractViolation);
}

TEST_CASE("margin decisions are invariant under constant shifts") {
    const ToySet toy;
    ClassifierHyper hyper;
    const auto clf =
        train_classifier(toy.features, toy.labels, ClassifierKind::OneVsAllMargin, hyper, 3);
    Rng rng(21);
    for (int i = 0; i < 30; ++i) {
        const std::vector<double> probe = {rng.uniform(-2, 8), rng.uniform(-2, 8)};
        std::vector<double> scores = clf->class_scores(probe);
        const auto base =
            std::max_element(scores.begin(), scores.end()) - scores.begin();
        for (double& s : scores) s += 17.25; // constant shift
        const auto shifted =
            std::max_element(scores.begin(), scores.end()) - scores.begin();
        CHECK(base == shifted);
    }
}

TEST_CASE("boosted softmax confidences are a probability distribution") {
    const ToySet toy;
    ClassifierHyper hyper;
    hyper.rounds = 15;
    const auto clf =
        train_classifier(toy.features, toy.labels, ClassifierKind::BoostedSoftmax, hyper, 5);
    Rng rng(9);
    for (int i = 0; i < 25; ++i) {
        const std::vector<double> probe = {rng.uniform(-2, 8), rng.uniform(-2, 8)};
        const std::vector<double> scores = clf->class_scores(probe);
        const double total = std::accumulate(scores.begin(), scores.end(), 0.0);
        CHECK(std::fabs(total - 1.0) <= 1e-6);
        for (double s : scores) CHECK(s >= 0.0);
    }
}

TEST_CASE("boosted trees handle a set no linear rule can") {
    // One class occupies both ends of the axis, the other the middle: no
    // single threshold separates them, two stacked splits do.
    const std::vector<std::vector<double>> features = {{0.1}, {0.2}, {0.45}, {0.55}, {0.8}, {0.9}};
    const std::vector<std::string> labels = {"edge", "edge", "core", "core", "edge", "edge"};
    ClassifierHyper hyper;
    hyper.rounds = 40;
    const auto clf =
        train_classifier(features, labels, ClassifierKind::BoostedSoftmax, hyper, 13);
    for (std::size_t i = 0; i < features.size(); ++i) {
        CHECK(clf->classify(features[i]).identity == labels[i]);
    }
}

TEST_CASE("three-class one_vs_all picks the most confident class") {
    std::vector<std::vector<double>> features;
    std::vector<std::string> labels;
    Rng rng(88);
    const std::vector<std::pair<double, double>> centers = {{0, 0}, {6, 0}, {3, 6}};
    const std::vector<std::string> names = {"p0", "p1", "p2"};
    for (int k = 0; k < 3; ++k) {
        for (int i = 0; i < 8; ++i) {
            features.push_back({centers[k].first + rng.gaussian(0, 0.3),
                                centers[k].second + rng.gaussian(0, 0.3)});
            labels.push_back(names[k]);
        }
    }
    ClassifierHyper hyper;
    const auto clf =
        train_classifier(features, labels, ClassifierKind::OneVsAllMargin, hyper, 17);
    int correct = 0;
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (clf->classify(features[i]).identity == labels[i]) ++correct;
    }
    CHECK(correct == static_cast<int>(features.size()));
}

TEST_CASE("checkpoints round trip both kinds bit-for-bit") {
    const ToySet toy;
    ClassifierHyper hyper;
    hyper.rounds = 8;
    for (ClassifierKind kind : {ClassifierKind::OneVsAllMargin, ClassifierKind::BoostedSoftmax}) {
        const auto clf = train_classifier(toy.features, toy.labels, kind, hyper, 42);
        const std::string path = "fb_test_clf.json";
        save_classifier(*clf, hyper, 42, path);
        const auto loaded = load_classifier(path);
        CHECK(loaded->kind() == kind);
        CHECK(loaded->labels() == clf->labels());
        CHECK(loaded->dimension() == clf->dimension());
        Rng rng(30);
        for (int i = 0; i < 15; ++i) {
            const std::vector<double> probe = {rng.uniform(-1, 7), rng.uniform(-1, 7)};
            CHECK(loaded->class_scores(probe) == clf->class_scores(probe));
        }
        std::remove(path.c_str());
    }
    CHECK_THROWS_AS(load_classifier("no_such_checkpoint.json"), IoError);
}

TEST_CASE("classifier kind names round trip through the registry") {
    CHECK(classifier_kind_from_name("one_vs_all_margin") == ClassifierKind::OneVsAllMargin);
    CHECK(classifier_kind_from_name("boosted_softmax") == ClassifierKind::BoostedSoftmax);
    CHECK_THROWS_AS(classifier_kind_from_name("mlp"), RegistryError);
    CHECK(classifier_kind_name(ClassifierKind::BoostedSoftmax) == "boosted_softmax");
}
