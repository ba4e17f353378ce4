#include <algorithm>
#include <cmath>

#include "facebench/core/error.hpp"
#include "facebench/core/rng.hpp"
#include "facebench/detect/analyzer.hpp"
#include "facebench/imaging/codec.hpp"
#include "facebench/run/experiment.hpp"

namespace facebench::run {

namespace {

// Identities in order of first appearance, with their image ids in record
// order. Keeps every protocol independent of container sort order.
std::vector<std::pair<std::string, std::vector<std::string>>> group_by_identity(
    const DatasetManifest& manifest) {
    std::vector<std::pair<std::string, std::vector<std::string>>> groups;
    std::map<std::string, std::size_t> index;
    for (const ManifestRecord& rec : manifest.records) {
        const auto it = index.find(rec.identity);
        if (it == index.end()) {
            index[rec.identity] = groups.size();
            groups.push_back({rec.identity, {rec.image_id}});
        } else {
            groups[it->second].second.push_back(rec.image_id);
        }
    }
    return groups;
}

bool known_variant(const std::string& name) {
    const auto& names = variant_names();
    return std::find(names.begin(), names.end(), name) != names.end();
}

} // namespace

SplitPlan make_splits(const DatasetManifest& manifest, double train_ratio, std::uint64_t seed) {
    if (!(train_ratio > 0.0 && train_ratio < 1.0))
        throw ContractViolation("make_splits: train_ratio must lie strictly inside (0,1)");
    SplitPlan plan;
    plan.train_ratio = train_ratio;
    plan.seed = seed;
    const auto groups = group_by_identity(manifest);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const auto& [identity, ids] = groups[g];
        if (ids.size() < 2) {
            plan.excluded_identities.push_back(identity);
            continue;
        }
        std::vector<std::string> shuffled = ids;
        Rng rng(Rng::derive(seed, g));
        rng.shuffle(shuffled);
        const auto n = static_cast<long long>(shuffled.size());
        long long n_train = std::llround(static_cast<double>(n) * train_ratio);
        n_train = std::clamp(n_train, 1LL, n - 1);
        for (long long i = 0; i < n; ++i) plan.is_train[shuffled[i]] = i < n_train;
    }
    return plan;
}

EmbeddedVariant embed_variant(const DatasetManifest& manifest, const std::string& backbone_id,
                              const std::string& model_root) {
    EmbeddedVariant out;
    out.variant = manifest.name;
    if (known_variant(manifest.name))
        out.detection.reference_rate = reference_detection_rate(manifest.name);
    for (const ManifestRecord& rec : manifest.records) {
        ++out.detection.total;
        const Image img = load_image(rec.path);
        const detect::SingleFaceResult face = detect::detect_single_face(img);
        if (!face.accepted()) {
            if (face.rejection == "none")
                ++out.detection.rejected_none;
            else
                ++out.detection.rejected_multiple;
            continue;
        }
        ++out.detection.accepted;
        embed::EmbeddingRecord e =
            embed::extract_embedding(img, *face.box, backbone_id, model_root);
        e.identity = rec.identity;
        e.dataset = manifest.name;
        e.image_id = rec.image_id;
        out.records.push_back(std::move(e));
    }
    out.detection.total += static_cast<int>(manifest.excluded.size());
    return out;
}

EnrolmentGallery build_enrolment_gallery(const EmbeddedVariant& benchmark) {
    EnrolmentGallery gallery;
    std::set<std::string> seen;
    for (const embed::EmbeddingRecord& rec : benchmark.records) {
        if (seen.count(rec.identity)) continue;
        seen.insert(rec.identity);
        gallery.entries.push_back({rec.identity, rec.vector});
        gallery.enrolment_image_ids.insert(rec.image_id);
    }
    if (gallery.entries.empty())
        throw ContractViolation("build_enrolment_gallery: no accepted enrolment images");
    return gallery;
}

ClosedSetRow distance_closed_set(const EnrolmentGallery& gallery, const EmbeddedVariant& variant,
                                 match::Metric metric) {
    std::vector<bool> correct;
    for (const embed::EmbeddingRecord& rec : variant.records) {
        if (gallery.enrolment_image_ids.count(rec.image_id)) continue;
        const auto ranked = match::rank_gallery(rec.vector, gallery.entries, metric);
        correct.push_back(!ranked.empty() && ranked.front().identity == rec.identity);
    }
    if (correct.empty())
        throw ContractViolation("distance_closed_set: variant '" + variant.variant +
                                "' has no probes outside the enrolment set");
    ClosedSetRow row;
    row.variant = variant.variant;
    row.method = match::metric_name(metric);
    row.probes = static_cast<int>(correct.size());
    row.accuracy = metrics::closed_set_accuracy(correct);
    return row;
}

std::string regime_name(TrainRegime regime) {
    switch (regime) {
        case TrainRegime::Benchmark: return "benchmark";
        case TrainRegime::SameVariant: return "filter";
        case TrainRegime::All: return "all";
    }
    throw ContractViolation("regime_name: unknown regime");
}

namespace {

struct TrainingSet {
    std::vector<std::vector<double>> features;
    std::vector<std::string> labels;
};

void append_train_records(const EmbeddedVariant& variant, const SplitPlan& split,
                          TrainingSet& out) {
    for (const embed::EmbeddingRecord& rec : variant.records) {
        if (!split.in_train(rec.image_id)) continue;
        out.features.push_back(rec.vector);
        out.labels.push_back(rec.identity);
    }
}

// GAR of classifier predictions over a variant's test-split records, scaled
// through the training scaler. Split-excluded images are absent from the
// plan, so they never reach evaluation.
ClosedSetRow evaluate_classifier(const match::Classifier& clf, const embed::MinMaxScaler& scaler,
                                 const EmbeddedVariant& variant, const SplitPlan& split,
                                 const std::string& method) {
    std::vector<bool> correct;
    for (const embed::EmbeddingRecord& rec : variant.records) {
        if (!split.in_test(rec.image_id)) continue;
        const match::Prediction p = clf.classify(scaler.apply(rec.vector));
        correct.push_back(p.identity == rec.identity);
    }
    if (correct.empty())
        throw ContractViolation("classifier evaluation: variant '" + variant.variant +
                                "' has no test-split probes");
    ClosedSetRow row;
    row.variant = variant.variant;
    row.method = method;
    row.probes = static_cast<int>(correct.size());
    row.accuracy = metrics::closed_set_accuracy(correct);
    return row;
}

struct TrainedClassifier {
    std::unique_ptr<match::Classifier> clf;
    embed::MinMaxScaler scaler;
};

TrainedClassifier train_on(const TrainingSet& train, const ClassifierProtocol& protocol,
                           const std::string& fitted_on) {
    if (train.features.empty())
        throw ContractViolation("classifier training: empty training set");
    const embed::ScaledMatrices scaled = embed::fit_apply_minmax(train.features, {}, fitted_on);
    TrainedClassifier out;
    out.scaler = scaled.scaler;
    out.clf = match::train_classifier(scaled.train, train.labels, protocol.kind, protocol.hyper,
                                      protocol.seed);
    return out;
}

const EmbeddedVariant& regime_anchor(const std::vector<EmbeddedVariant>& variants) {
    for (const EmbeddedVariant& v : variants)
        if (v.variant == "benchmark") return v;
    return variants.front();
}

} // namespace

std::vector<ClosedSetRow> classifier_closed_set(const std::vector<EmbeddedVariant>& variants,
                                                const SplitPlan& split,
                                                const ClassifierProtocol& protocol,
                                                TrainRegime regime) {
    if (variants.empty())
        throw ContractViolation("classifier_closed_set: no variants");
    const std::string method =
        match::classifier_kind_name(protocol.kind) + "/train=" + regime_name(regime);
    std::vector<ClosedSetRow> rows;
    if (regime == TrainRegime::SameVariant) {
        for (const EmbeddedVariant& v : variants) {
            TrainingSet train;
            append_train_records(v, split, train);
            const TrainedClassifier tc = train_on(train, protocol, v.variant);
            rows.push_back(evaluate_classifier(*tc.clf, tc.scaler, v, split, method));
        }
        return rows;
    }
    TrainingSet train;
    if (regime == TrainRegime::Benchmark) {
        append_train_records(regime_anchor(variants), split, train);
    } else {
        for (const EmbeddedVariant& v : variants) append_train_records(v, split, train);
    }
    const TrainedClassifier tc =
        train_on(train, protocol, regime == TrainRegime::Benchmark ? "benchmark" : "all");
    for (const EmbeddedVariant& v : variants)
        rows.push_back(evaluate_classifier(*tc.clf, tc.scaler, v, split, method));
    return rows;
}

CrossFilterMatrix cross_filter_matrix(const std::vector<EmbeddedVariant>& variants,
                                      const SplitPlan& split,
                                      const ClassifierProtocol& protocol) {
    if (variants.empty())
        throw ContractViolation("cross_filter_matrix: no variants");
    CrossFilterMatrix m;
    m.classifier = match::classifier_kind_name(protocol.kind);
    for (const EmbeddedVariant& v : variants) m.variants.push_back(v.variant);
    for (const EmbeddedVariant& train_variant : variants) {
        TrainingSet train;
        append_train_records(train_variant, split, train);
        const TrainedClassifier tc = train_on(train, protocol, train_variant.variant);
        std::vector<double> row;
        for (const EmbeddedVariant& test_variant : variants)
            row.push_back(
                evaluate_classifier(*tc.clf, tc.scaler, test_variant, split, m.classifier)
                    .accuracy.gar);
        m.gar.push_back(std::move(row));
    }
    return m;
}

std::vector<std::string> select_heldout_identities(const DatasetManifest& source,
                                                   std::uint64_t seed) {
    std::vector<std::string> identities;
    for (const auto& [identity, ids] : group_by_identity(source)) identities.push_back(identity);
    // Watchlist proportion of the reference protocol: 58 of 158 subjects stay
    // outside the gallery.
    const auto k = static_cast<std::size_t>(
        std::llround(static_cast<double>(identities.size()) * 58.0 / 158.0));
    Rng rng(Rng::derive(seed, 777001));
    rng.shuffle(identities);
    identities.resize(k);
    std::sort(identities.begin(), identities.end());
    return identities;
}

OpenSetResult open_set_eval(const EmbeddedVariant& variant, const SplitPlan& split,
                            const std::vector<std::string>& heldout,
                            const ClassifierProtocol& protocol) {
    const std::set<std::string> out_of_gallery(heldout.begin(), heldout.end());
    TrainingSet train;
    std::set<std::string> gallery_ids;
    for (const embed::EmbeddingRecord& rec : variant.records) {
        if (out_of_gallery.count(rec.identity)) continue;
        if (!split.in_train(rec.image_id)) continue;
        train.features.push_back(rec.vector);
        train.labels.push_back(rec.identity);
        gallery_ids.insert(rec.identity);
    }
    const TrainedClassifier tc = train_on(train, protocol, variant.variant);

    OpenSetResult result;
    result.variant = variant.variant;
    result.gallery_identities = static_cast<int>(gallery_ids.size());
    result.scores.polarity = metrics::Polarity::HigherIsBetter;
    std::set<std::string> heldout_seen;
    std::vector<double> all_top_scores;
    for (const embed::EmbeddingRecord& rec : variant.records) {
        if (out_of_gallery.count(rec.identity)) {
            const match::Prediction p = tc.clf->classify(tc.scaler.apply(rec.vector));
            result.scores.nonmated.push_back(p.confidence);
            all_top_scores.push_back(p.confidence);
            heldout_seen.insert(rec.identity);
            continue;
        }
        if (!split.in_test(rec.image_id)) continue;
        const match::Prediction p = tc.clf->classify(tc.scaler.apply(rec.vector));
        result.scores.mated.push_back({p.confidence, p.identity == rec.identity});
        all_top_scores.push_back(p.confidence);
    }
    result.heldout_identities = static_cast<int>(heldout_seen.size());
    if (result.scores.mated.empty() || result.scores.nonmated.empty())
        throw ContractViolation("open_set_eval: variant '" + variant.variant +
                                "' yields an empty mated or non-mated search set");
    result.curve =
        metrics::open_set_sweep(result.scores, metrics::default_thresholds(all_top_scores));
    return result;
}

VerificationRow verification_eval(const EnrolmentGallery& gallery,
                                  const EmbeddedVariant& variant, match::Metric metric) {
    std::vector<double> genuine;
    std::vector<double> impostor;
    for (const embed::EmbeddingRecord& rec : variant.records) {
        if (gallery.enrolment_image_ids.count(rec.image_id)) continue;
        for (const auto& [identity, vec] : gallery.entries) {
            const double d = match::pairwise_distance(rec.vector, vec, metric);
            (identity == rec.identity ? genuine : impostor).push_back(d);
        }
    }
    if (genuine.empty() || impostor.empty())
        throw ContractViolation("verification_eval: variant '" + variant.variant +
                                "' yields an empty genuine or impostor set");
    std::vector<double> pooled = genuine;
    pooled.insert(pooled.end(), impostor.begin(), impostor.end());
    const metrics::DETCurve curve =
        metrics::verification_sweep(genuine, impostor, metrics::default_thresholds(pooled));
    VerificationRow row;
    row.variant = variant.variant;
    row.metric = match::metric_name(metric);
    row.eer = metrics::compute_eer(curve);
    row.genuine = static_cast<int>(genuine.size());
    row.impostor = static_cast<int>(impostor.size());
    return row;
}

void append_verification_averages(std::vector<VerificationRow>& rows) {
    std::vector<std::string> metric_order;
    std::map<std::string, std::vector<const VerificationRow*>> by_metric;
    for (const VerificationRow& row : rows) {
        if (row.variant == "average") continue;
        if (!by_metric.count(row.metric)) metric_order.push_back(row.metric);
        by_metric[row.metric].push_back(&row);
    }
    for (const std::string& metric : metric_order) {
        const auto& group = by_metric[metric];
        VerificationRow avg;
        avg.variant = "average";
        avg.metric = metric;
        for (const VerificationRow* r : group) {
            avg.eer.eer += r->eer.eer;
            avg.eer.threshold += r->eer.threshold;
            avg.eer.no_crossing = avg.eer.no_crossing || r->eer.no_crossing;
            avg.genuine += r->genuine;
            avg.impostor += r->impostor;
        }
        avg.eer.eer /= static_cast<double>(group.size());
        avg.eer.threshold /= static_cast<double>(group.size());
        rows.push_back(avg);
    }
}

} // namespace facebench::run
