#ifndef FACEBENCH_RUN_CORPUS_HPP
#define FACEBENCH_RUN_CORPUS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "facebench/data/manifest.hpp"
#include "facebench/filter/dataset.hpp"
#include "facebench/filter/engine.hpp"
#include "facebench/recon/unet.hpp"

namespace facebench::run {

// Per-variant exactly-one-face accounting. The published full-scale detection
// rate for the matching variant rides along for display next to the measured
// desk-scale rate; it is reference context, never an assertion.
struct DetectionSummary {
    int total = 0;
    int accepted = 0;
    int rejected_none = 0;
    int rejected_multiple = 0;
    double reference_rate = 0.0;

    double rate() const { return total == 0 ? 0.0 : static_cast<double>(accepted) / total; }
};

// The eight dataset variants in report order.
const std::vector<std::string>& variant_names();

// Published full-scale detection rate for a variant (fraction in [0,1]).
double reference_detection_rate(const std::string& variant);

// Renders n_identities x images_per_identity parameterized faces with exact
// landmark ground truth. Writes images/<image_id>.png, landmarks/<image_id>.json
// and manifest.json under out_dir. Image ids are zero-padded so lexicographic
// order equals render order and the first image of each identity sorts first.
// images_per_identity below min_images violates the corpus floor rule.
DatasetManifest generate_synthetic_corpus(int n_identities, int images_per_identity,
                                          std::uint64_t seed, const std::string& out_dir,
                                          int image_size = 96, int min_images = 10);

struct VariantBuild {
    std::vector<DatasetManifest> manifests;            // variant_names() order
    std::map<std::string, DetectionSummary> detection;  // per variant
};

// Builds all eight variants under out_dir/<variant>/: the unfiltered
// benchmark (referencing source images in place), dog, glasses, a seeded
// random enhancement per image, the two shades opacities, and reconstructions
// of both shades variants through recon_model. Refuses to run when the model
// was trained on this corpus or carries no training-corpus id (leak guard).
VariantBuild build_all_variants(const DatasetManifest& source,
                                const filter::FilterEngine& engine,
                                const recon::UNet& recon_model, std::uint64_t filter_seed,
                                const std::string& out_dir);

// (occluded, clean) training pairs for the reconstructor: applies the given
// AR filter to every corpus image. Images without landmarks are skipped.
std::vector<recon::ImagePair> build_occlusion_pairs(const DatasetManifest& corpus,
                                                    const filter::FilterEngine& engine,
                                                    const std::string& filter_id);

} // namespace facebench::run

#endif
