#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "facebench/core/error.hpp"
#include "facebench/core/rng.hpp"
#include "facebench/detect/analyzer.hpp"
#include "facebench/imaging/codec.hpp"
#include "facebench/run/corpus.hpp"
#include "facebench/synth/face.hpp"

namespace facebench::run {

namespace {

struct VariantInfo {
    const char* name;
    double reference_rate;
};

// Report order with the published full-scale detection rates (display only).
constexpr VariantInfo kVariants[] = {
    {"benchmark", 0.989},          {"dog", 0.978},
    {"glasses", 0.848},            {"instagram", 0.989},
    {"shades_leak", 0.891},        {"shades_recon_leak", 0.992},
    {"shades_no_leak", 0.885},     {"shades_recon_no_leak", 0.988},
};

std::string image_id_for(int identity, int shot) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "id%03d_s%02d", identity, shot);
    return buf;
}

nlohmann::json points_json(const std::vector<Point>& pts) {
    nlohmann::json arr = nlohmann::json::array();
    for (const Point& p : pts) arr.push_back({p.x, p.y});
    return arr;
}

// The evaluation pipeline always sees 8-bit files; keep in-memory pairs on
// the same grid so reconstruction trains on what it will be fed.
Image quantize_roundtrip(const Image& img) {
    Image out = img;
    for (float& v : out.data()) v = static_cast<float>(Image::quantize(v)) / 255.0f;
    return out;
}

} // namespace

const std::vector<std::string>& variant_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const VariantInfo& info : kVariants) v.emplace_back(info.name);
        return v;
    }();
    return names;
}

double reference_detection_rate(const std::string& variant) {
    for (const VariantInfo& info : kVariants)
        if (variant == info.name) return info.reference_rate;
    throw RegistryError("Unknown variant '" + variant + "'");
}

DatasetManifest generate_synthetic_corpus(int n_identities, int images_per_identity,
                                          std::uint64_t seed, const std::string& out_dir,
                                          int image_size, int min_images) {
    if (n_identities < 2) throw ContractViolation("Corpus needs at least 2 identities");
    if (images_per_identity < min_images)
        throw ContractViolation("Corpus floor: " + std::to_string(images_per_identity) +
                                " images per identity is below the minimum of " +
                                std::to_string(min_images));
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(out_dir) / "images");
    fs::create_directories(fs::path(out_dir) / "landmarks");

    DatasetManifest manifest;
    manifest.name = "corpus";
    manifest.source = "synth-" + std::to_string(seed) + "-" + std::to_string(n_identities) +
                      "x" + std::to_string(images_per_identity);
    for (int id = 0; id < n_identities; ++id) {
        Rng id_rng(Rng::derive(seed, id));
        const synth::IdentityParams params = synth::sample_identity(id_rng);
        const std::string identity = "id" + std::to_string(id);
        for (int shot = 0; shot < images_per_identity; ++shot) {
            Rng jit_rng(Rng::derive(seed, 1000 + id * 100 + shot));
            const synth::ImageJitter jitter = synth::sample_jitter(jit_rng);
            const synth::RenderResult r =
                synth::render_face(params, jitter, image_size, image_size);
            const std::string image_id = image_id_for(id, shot);
            const std::string path =
                (fs::path(out_dir) / "images" / (image_id + ".png")).string();
            save_png(r.image, path);

            nlohmann::json gt;
            gt["image_id"] = image_id;
            gt["chin"] = points_json(r.landmarks.chin);
            gt["left_eyebrow"] = points_json(r.landmarks.left_eyebrow);
            gt["right_eyebrow"] = points_json(r.landmarks.right_eyebrow);
            gt["nose_bridge"] = points_json(r.landmarks.nose_bridge);
            gt["nose_tip"] = points_json(r.landmarks.nose_tip);
            gt["left_eye"] = points_json(r.landmarks.left_eye);
            gt["right_eye"] = points_json(r.landmarks.right_eye);
            gt["top_lip"] = points_json(r.landmarks.top_lip);
            gt["bottom_lip"] = points_json(r.landmarks.bottom_lip);
            std::ofstream gt_out(
                (fs::path(out_dir) / "landmarks" / (image_id + ".json")).string());
            gt_out << gt.dump(1) << "\n";
            if (!gt_out)
                throw IoError("Failed writing landmark ground truth for " + image_id);

            manifest.records.push_back({image_id, identity, path, "rendered"});
        }
    }
    validate_manifest(manifest, min_images);
    save_manifest(manifest, (fs::path(out_dir) / "manifest.json").string());
    return manifest;
}

namespace {

DatasetManifest build_recon_variant(const DatasetManifest& occluded, const recon::UNet& model,
                                    const std::string& out_dir, const std::string& name) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    DatasetManifest out;
    out.name = name;
    out.source = occluded.source;
    for (const ManifestRecord& rec : occluded.records) {
        try {
            const Image img = load_image(rec.path);
            const Image restored = recon::reconstruct(model, img);
            const std::string path = (fs::path(out_dir) / (rec.image_id + ".png")).string();
            save_png(restored, path);
            out.records.push_back({rec.image_id, rec.identity, path, "recon:" + occluded.name});
        } catch (const DecodeError& e) {
            out.excluded.push_back({rec.image_id, std::string("io:") + e.what()});
        } catch (const IoError& e) {
            out.excluded.push_back({rec.image_id, std::string("io:") + e.what()});
        }
    }
    for (const ExclusionRecord& e : occluded.excluded) out.excluded.push_back(e);
    return out;
}

DetectionSummary summarize_detection(const DatasetManifest& manifest) {
    DetectionSummary s;
    s.reference_rate = reference_detection_rate(manifest.name);
    for (const ManifestRecord& rec : manifest.records) {
        ++s.total;
        const detect::SingleFaceResult r = detect::detect_single_face(load_image(rec.path));
        if (r.accepted())
            ++s.accepted;
        else if (r.rejection == "none")
            ++s.rejected_none;
        else
            ++s.rejected_multiple;
    }
    // Excluded records count toward the variant total as undetectable images.
    s.total += static_cast<int>(manifest.excluded.size());
    return s;
}

} // namespace

VariantBuild build_all_variants(const DatasetManifest& source,
                                const filter::FilterEngine& engine,
                                const recon::UNet& recon_model, std::uint64_t filter_seed,
                                const std::string& out_dir) {
    if (recon_model.trained_on.empty())
        throw ContractViolation(
            "Leak guard: the reconstruction model carries no training-corpus id; refusing to "
            "build evaluation variants with a model of unknown provenance");
    if (recon_model.trained_on == source.source)
        throw ContractViolation("Leak guard: the reconstruction model was trained on corpus '" +
                                source.source +
                                "', which is the evaluation corpus; training and evaluation "
                                "corpora must be disjoint");

    namespace fs = std::filesystem;
    VariantBuild build;

    DatasetManifest benchmark;
    benchmark.name = "benchmark";
    benchmark.source = source.source;
    for (const ManifestRecord& rec : source.records)
        benchmark.records.push_back({rec.image_id, rec.identity, rec.path, "unfiltered"});
    benchmark.excluded = source.excluded;

    const auto variant_dir = [&](const std::string& name) {
        return (fs::path(out_dir) / name).string();
    };
    const DatasetManifest dog = filter::build_filtered_dataset(
        source, engine, filter::FilterChoice::fixed("dog"), filter_seed, variant_dir("dog"),
        "dog");
    const DatasetManifest glasses = filter::build_filtered_dataset(
        source, engine, filter::FilterChoice::fixed("glasses"), filter_seed,
        variant_dir("glasses"), "glasses");
    const DatasetManifest instagram = filter::build_filtered_dataset(
        source, engine, filter::FilterChoice::random_enhancement(), filter_seed,
        variant_dir("instagram"), "instagram");
    const DatasetManifest shades_leak = filter::build_filtered_dataset(
        source, engine, filter::FilterChoice::fixed("shades_leak"), filter_seed,
        variant_dir("shades_leak"), "shades_leak");
    const DatasetManifest shades_no_leak = filter::build_filtered_dataset(
        source, engine, filter::FilterChoice::fixed("shades_no_leak"), filter_seed,
        variant_dir("shades_no_leak"), "shades_no_leak");
    const DatasetManifest recon_leak = build_recon_variant(
        shades_leak, recon_model, variant_dir("shades_recon_leak"), "shades_recon_leak");
    const DatasetManifest recon_no_leak = build_recon_variant(
        shades_no_leak, recon_model, variant_dir("shades_recon_no_leak"),
        "shades_recon_no_leak");

    build.manifests = {benchmark,   dog,          glasses,        instagram,
                       shades_leak, recon_leak,   shades_no_leak, recon_no_leak};
    for (DatasetManifest& m : build.manifests) {
        fs::create_directories(variant_dir(m.name));
        save_manifest(m, (fs::path(variant_dir(m.name)) / "manifest.json").string());
        build.detection[m.name] = summarize_detection(m);
    }
    return build;
}

std::vector<recon::ImagePair> build_occlusion_pairs(const DatasetManifest& corpus,
                                                    const filter::FilterEngine& engine,
                                                    const std::string& filter_id) {
    std::vector<recon::ImagePair> pairs;
    for (const ManifestRecord& rec : corpus.records) {
        const Image clean = load_image(rec.path);
        const std::optional<Image> occluded = engine.apply_ar_filter(clean, filter_id);
        if (!occluded) continue;
        pairs.push_back({quantize_roundtrip(*occluded), clean});
    }
    return pairs;
}

} // namespace facebench::run
