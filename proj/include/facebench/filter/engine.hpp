#ifndef FACEBENCH_FILTER_ENGINE_HPP
#define FACEBENCH_FILTER_ENGINE_HPP

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "facebench/filter/landmarks.hpp"
#include "facebench/filter/lut.hpp"
#include "facebench/imaging/codec.hpp"
#include "facebench/imaging/geometry.hpp"
#include "facebench/imaging/image.hpp"

namespace facebench::filter {

// What a filter id means: an enhancement (global color mapping) or an AR
// overlay (landmark-anchored asset blend), plus numeric parameters such as
// blend opacity.
struct FilterSpec {
    enum class Kind { Enhancement, ArOverlay };
    Kind kind = Kind::Enhancement;
    std::string filter_id;
    std::map<std::string, double> params;

    double param(const std::string& name, double fallback) const {
        const auto it = params.find(name);
        return it == params.end() ? fallback : it->second;
    }
};

// Canonical spec for a known filter id. AR overlays carry their fixed blend
// opacity (shades_leak 0.95, everything else 1.0) and backing asset name.
// Unknown ids throw RegistryError listing the valid ids.
FilterSpec filter_spec(const std::string& filter_id);

std::vector<std::string> ar_ids();

// Overlay asset: RGB plus alpha plane, with anchor points that the placement
// rules align to detected landmarks. kind is "eye_pair" (anchors at the two
// eye holes) or "nose" (single anchor at the sprite's nose center).
struct ArAsset {
    Image rgb;
    std::vector<float> alpha;
    std::string kind;
    Point left_anchor;
    Point right_anchor;
    Point nose_anchor;
};

// Procedurally drawn bundled assets, keyed by asset name {dog, glasses,
// shades}. Deterministic; used both to emit the bundled files and to verify
// them.
ArAsset make_ar_asset(const std::string& asset_name);

void save_ar_asset(const ArAsset& asset, const std::string& png_path,
                   const std::string& json_path);
ArAsset load_ar_asset(const std::string& png_path, const std::string& json_path);

// Materialize the bundled asset tree under a root directory: one baked LUT
// per enhancement id at luts/<id>.lut33 and one PNG+JSON pair per overlay at
// ar/<name>.png / ar/<name>.json. Deterministic; overwrites existing files.
void write_asset_root(const std::string& root);

// Compute the similarity placement for an AR filter over an image of the
// given dimensions. Glasses/shades: asset eye holes map onto the left/right
// eye centroids (rotation = eye-line angle, scale = eye spacing ratio). Dog:
// sprite nose anchor maps onto the nose_tip centroid with sprite width scaled
// to 1.5x the inter-eye distance. Throws PlacementError when the landmark
// geometry is degenerate (coincident eye centers).
Placement place_asset(const LandmarkSet& landmarks, const ArAsset& asset,
                      const FilterSpec& spec, int img_w, int img_h);

// Pluggable landmark source, so the engine does not depend on any concrete
// detector.
using LandmarkFn = std::function<std::optional<LandmarkSet>(const Image&)>;

// Applies enhancement and AR filters, lazily loading LUTs and overlay assets
// from an asset root directory (layout: luts/<id>.lut33, ar/<name>.png +
// <name>.json).
class FilterEngine {
public:
    explicit FilterEngine(std::string asset_root, LandmarkFn landmark_fn = nullptr);

    // Global color mapping through the filter's LUT. "identity" returns the
    // input unchanged.
    Image apply_enhancement(const Image& img, const std::string& filter_id) const;

    // Landmark-anchored overlay at the spec opacity; absent when no landmarks
    // are found.
    std::optional<Image> apply_ar_filter(const Image& img, const std::string& filter_id) const;

    Placement place(const LandmarkSet& landmarks, const std::string& filter_id, int img_w,
                    int img_h) const;

    const ArAsset& asset_for(const std::string& filter_id) const;
    const Lut3d& lut_for(const std::string& filter_id) const;

private:
    std::string root_;
    LandmarkFn landmark_fn_;
    mutable std::map<std::string, Lut3d> lut_cache_;
    mutable std::map<std::string, ArAsset> asset_cache_;
};

} // namespace facebench::filter

#endif
