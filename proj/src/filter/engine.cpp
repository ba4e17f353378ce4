#include <cmath>
#include <filesystem>

#include "facebench/core/error.hpp"
#include "facebench/filter/engine.hpp"
#include "facebench/filter/tone_curves.hpp"

namespace facebench::filter {

namespace {

std::string joined_ids(const std::vector<std::string>& ids) {
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) out += ", ";
        out += ids[i];
    }
    return out;
}

std::string asset_name_for(const std::string& filter_id) {
    if (filter_id == "dog") return "dog";
    if (filter_id == "glasses") return "glasses";
    if (filter_id == "shades_leak" || filter_id == "shades_no_leak") return "shades";
    throw RegistryError("No overlay asset for filter '" + filter_id + "'");
}

} // namespace

std::vector<std::string> ar_ids() { return {"dog", "glasses", "shades_leak", "shades_no_leak"}; }

FilterSpec filter_spec(const std::string& filter_id) {
    FilterSpec spec;
    spec.filter_id = filter_id;
    for (const std::string& id : enhancement_ids()) {
        if (id == filter_id) {
            spec.kind = FilterSpec::Kind::Enhancement;
            return spec;
        }
    }
    spec.kind = FilterSpec::Kind::ArOverlay;
    if (filter_id == "dog" || filter_id == "glasses") {
        spec.params["opacity"] = 1.0;
        return spec;
    }
    if (filter_id == "shades_leak") {
        spec.params["opacity"] = 0.95;
        return spec;
    }
    if (filter_id == "shades_no_leak") {
        spec.params["opacity"] = 1.0;
        return spec;
    }
    std::vector<std::string> valid = enhancement_ids();
    for (const std::string& id : ar_ids()) valid.push_back(id);
    throw RegistryError("Unknown filter '" + filter_id + "'; valid ids: " + joined_ids(valid));
}

void write_asset_root(const std::string& root) {
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(root) / "luts");
    fs::create_directories(fs::path(root) / "ar");
    for (const std::string& id : enhancement_ids()) {
        const ToneCurve curve =
            id == "identity" ? ToneCurve{} : enhancement_curves().at(id);
        save_lut(bake_lut(curve), (fs::path(root) / "luts" / (id + ".lut33")).string());
    }
    for (const std::string& name : {"dog", "glasses", "shades"}) {
        const ArAsset asset = make_ar_asset(name);
        const fs::path base = fs::path(root) / "ar" / name;
        save_ar_asset(asset, base.string() + ".png", base.string() + ".json");
    }
}

Placement place_asset(const LandmarkSet& landmarks, const ArAsset& asset,
                      const FilterSpec& spec, int img_w, int img_h) {
    if (spec.kind != FilterSpec::Kind::ArOverlay)
        throw ContractViolation("place_asset requires an AR overlay filter spec");
    if (!landmarks.valid())
        throw ContractViolation("Landmark set does not satisfy the placement preconditions");

    const Point le = left_eye_center(landmarks);
    const Point re = right_eye_center(landmarks);
    const double eye_dx = re.x - le.x;
    const double eye_dy = re.y - le.y;
    const double eye_dist = std::hypot(eye_dx, eye_dy);
    if (eye_dist < 1e-9)
        throw PlacementError("Eye centers coincide; overlay orientation is undefined");
    const double eye_angle = std::atan2(eye_dy, eye_dx);

    double scale = 1.0;
    Point target;      // image point the anchor must land on
    Point anchor;      // asset point being pinned
    if (asset.kind == "eye_pair") {
        const double hole_dx = asset.right_anchor.x - asset.left_anchor.x;
        const double hole_dy = asset.right_anchor.y - asset.left_anchor.y;
        const double hole_dist = std::hypot(hole_dx, hole_dy);
        if (hole_dist < 1e-9)
            throw ContractViolation("Overlay asset eye holes coincide");
        scale = eye_dist / hole_dist;
        anchor = asset.left_anchor;
        target = le;
    } else if (asset.kind == "nose") {
        scale = 1.5 * eye_dist / asset.rgb.width();
        anchor = asset.nose_anchor;
        target = centroid(landmarks.nose_tip);
    } else {
        throw ContractViolation("Overlay asset kind '" + asset.kind + "' is not placeable");
    }

    Affine affine = Affine::similarity(scale, eye_angle, 0.0, 0.0);
    const Point moved = affine.apply(anchor);
    affine.tx = target.x - moved.x;
    affine.ty = target.y - moved.y;

    Placement placement;
    placement.affine = affine;
    placement.mask =
        warp_alpha(asset.alpha, asset.rgb.width(), asset.rgb.height(), affine, img_w, img_h);
    return placement;
}

FilterEngine::FilterEngine(std::string asset_root, LandmarkFn landmark_fn)
    : root_(std::move(asset_root)), landmark_fn_(std::move(landmark_fn)) {
    if (!root_.empty() && root_.back() == '/') root_.pop_back();
}

const Lut3d& FilterEngine::lut_for(const std::string& filter_id) const {
    const auto it = lut_cache_.find(filter_id);
    if (it != lut_cache_.end()) return it->second;
    const FilterSpec spec = filter_spec(filter_id);
    if (spec.kind != FilterSpec::Kind::Enhancement)
        throw ContractViolation("Filter '" + filter_id + "' is not an enhancement filter");
    return lut_cache_.emplace(filter_id, load_lut(root_ + "/luts/" + filter_id + ".lut33"))
        .first->second;
}

const ArAsset& FilterEngine::asset_for(const std::string& filter_id) const {
    const std::string name = asset_name_for(filter_id);
    const auto it = asset_cache_.find(name);
    if (it != asset_cache_.end()) return it->second;
    const std::string base = root_ + "/ar/" + name;
    return asset_cache_.emplace(name, load_ar_asset(base + ".png", base + ".json"))
        .first->second;
}

Image FilterEngine::apply_enhancement(const Image& img, const std::string& filter_id) const {
    const FilterSpec spec = filter_spec(filter_id);
    if (spec.kind != FilterSpec::Kind::Enhancement)
        throw RegistryError("Filter '" + filter_id + "' is not an enhancement filter; valid ids: " +
                            joined_ids(enhancement_ids()));
    if (filter_id == "identity") return img;
    return apply_lut(img, lut_for(filter_id));
}

Placement FilterEngine::place(const LandmarkSet& landmarks, const std::string& filter_id,
                              int img_w, int img_h) const {
    return place_asset(landmarks, asset_for(filter_id), filter_spec(filter_id), img_w, img_h);
}

std::optional<Image> FilterEngine::apply_ar_filter(const Image& img,
                                                   const std::string& filter_id) const {
    const FilterSpec spec = filter_spec(filter_id);
    if (spec.kind != FilterSpec::Kind::ArOverlay)
        throw RegistryError("Filter '" + filter_id + "' is not an AR filter; valid ids: " +
                            joined_ids(ar_ids()));
    if (!landmark_fn_)
        throw ConfigError("FilterEngine has no landmark source configured for AR filters");
    const std::optional<LandmarkSet> landmarks = landmark_fn_(img);
    if (!landmarks) return std::nullopt;
    const Placement placement = place_asset(*landmarks, asset_for(filter_id), spec,
                                            img.width(), img.height());
    return alpha_blend(img, asset_for(filter_id).rgb, placement, spec.param("opacity", 1.0));
}

} // namespace facebench::filter
