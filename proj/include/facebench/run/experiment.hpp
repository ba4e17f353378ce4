#ifndef FACEBENCH_RUN_EXPERIMENT_HPP
#define FACEBENCH_RUN_EXPERIMENT_HPP

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "facebench/data/manifest.hpp"
#include "facebench/embed/pipeline.hpp"
#include "facebench/match/classifier.hpp"
#include "facebench/match/distance.hpp"
#include "facebench/metrics/det.hpp"
#include "facebench/run/corpus.hpp"

namespace facebench::run {

// Stratified train/test assignment, drawn once per experiment and shared by
// every variant so that an image lands on the same side of the split no
// matter which filter produced it (variants keep source image ids).
struct SplitPlan {
    std::map<std::string, bool> is_train;          // image_id -> train side
    std::vector<std::string> excluded_identities;  // too few images to split
    double train_ratio = 0.8;
    std::uint64_t seed = 0;

    bool in_train(const std::string& image_id) const {
        const auto it = is_train.find(image_id);
        return it != is_train.end() && it->second;
    }
    bool in_test(const std::string& image_id) const {
        const auto it = is_train.find(image_id);
        return it != is_train.end() && !it->second;
    }
};

// Per identity, in record order: shuffle the identity's image ids with a
// stream derived from (seed, identity position) and send
// clamp(round(n * ratio), 1, n-1) of them to the train side. Identities with
// a single image cannot be split and are listed as excluded.
SplitPlan make_splits(const DatasetManifest& manifest, double train_ratio, std::uint64_t seed);

// One dataset variant pushed through detection and the feature backbone.
// records holds the accepted images in manifest order with raw (unscaled)
// feature vectors; detection accounts for every image of the variant.
struct EmbeddedVariant {
    std::string variant;
    std::vector<embed::EmbeddingRecord> records;
    DetectionSummary detection;
};

EmbeddedVariant embed_variant(const DatasetManifest& manifest, const std::string& backbone_id,
                              const std::string& model_root = "models");

// Enrolment protocol: the gallery holds exactly one raw embedding per
// identity, taken from the identity's first accepted unfiltered image in
// record order (ids are zero-padded, so record order equals capture order).
// Probe protocols exclude the enrolment image ids in every variant.
struct EnrolmentGallery {
    std::vector<std::pair<std::string, std::vector<double>>> entries;
    std::set<std::string> enrolment_image_ids;
};

EnrolmentGallery build_enrolment_gallery(const EmbeddedVariant& benchmark);

// One line of the closed-set identification table. method is either a
// distance metric name or "<classifier>/train=<regime>".
struct ClosedSetRow {
    std::string variant;
    std::string method;
    int probes = 0;
    metrics::ClosedSetAccuracy accuracy;
};

// Rank-1 identification of every accepted non-enrolment image of the variant
// against the benchmark enrolment gallery, on raw features.
ClosedSetRow distance_closed_set(const EnrolmentGallery& gallery, const EmbeddedVariant& variant,
                                 match::Metric metric);

// Which images train the classifier rows.
enum class TrainRegime { Benchmark, SameVariant, All };

std::string regime_name(TrainRegime regime);

struct ClassifierProtocol {
    match::ClassifierKind kind = match::ClassifierKind::OneVsAllMargin;
    match::ClassifierHyper hyper;
    std::uint64_t seed = 0;
};

// Classifier identification rows for all given variants under one training
// regime. Features are min-max scaled with a scaler fitted on the training
// matrix only; evaluation uses each variant's test-split records. Identities
// the split excluded take part in neither training nor evaluation. The
// benchmark variant (the regime anchor) is expected first in report order.
std::vector<ClosedSetRow> classifier_closed_set(const std::vector<EmbeddedVariant>& variants,
                                                const SplitPlan& split,
                                                const ClassifierProtocol& protocol,
                                                TrainRegime regime);

// Train-on-i, test-on-j identification accuracy over every ordered variant
// pair, one classifier per training variant.
struct CrossFilterMatrix {
    std::string classifier;
    std::vector<std::string> variants;      // row and column labels
    std::vector<std::vector<double>> gar;   // gar[train][test]
};

CrossFilterMatrix cross_filter_matrix(const std::vector<EmbeddedVariant>& variants,
                                      const SplitPlan& split,
                                      const ClassifierProtocol& protocol);

// Open-set watchlist split: round(n_identities * 58 / 158) identities are
// held out of the gallery, chosen by a seeded shuffle of the identity list in
// record order. Shared across variants.
std::vector<std::string> select_heldout_identities(const DatasetManifest& source,
                                                   std::uint64_t seed);

// Open-set identification on one variant: the classifier is trained on the
// train split of the in-gallery identities; mated searches are their
// test-split images, non-mated searches are every accepted image of the
// held-out identities. Top-confidence scores swept over all observed values.
struct OpenSetResult {
    std::string variant;
    metrics::ScoreSet scores;
    metrics::DETCurve curve;
    int gallery_identities = 0;
    int heldout_identities = 0;
};

OpenSetResult open_set_eval(const EmbeddedVariant& variant, const SplitPlan& split,
                            const std::vector<std::string>& heldout,
                            const ClassifierProtocol& protocol);

// One line of the verification table: 1:1 genuine/impostor separation of a
// variant's probes against the enrolment gallery at the given metric.
struct VerificationRow {
    std::string variant;
    std::string metric;
    metrics::EERResult eer;
    int genuine = 0;
    int impostor = 0;
};

VerificationRow verification_eval(const EnrolmentGallery& gallery,
                                  const EmbeddedVariant& variant, match::Metric metric);

// Appends one "average" row per metric (mean EER over the listed variants).
void append_verification_averages(std::vector<VerificationRow>& rows);

} // namespace facebench::run

#endif
