#include <array>
#include <cmath>

#include <nlohmann/json.hpp>

#include "facebench/core/error.hpp"
#include "facebench/filter/engine.hpp"

namespace facebench::filter {

namespace {

struct Canvas {
    Image rgb;
    std::vector<float> alpha;

    Canvas(int w, int h) : rgb(w, h, 0.0), alpha(static_cast<std::size_t>(w) * h, 0.0f) {}

    void put(int x, int y, const std::array<double, 3>& c) {
        rgb.set(x, y, c[0], c[1], c[2]);
        alpha[static_cast<std::size_t>(y) * rgb.width() + x] = 1.0f;
    }
};

bool in_ellipse(double x, double y, double cx, double cy, double rx, double ry) {
    const double nx = (x - cx) / rx;
    const double ny = (y - cy) / ry;
    return nx * nx + ny * ny <= 1.0;
}

double edge_side(double x, double y, Point a, Point b) {
    return (b.x - a.x) * (y - a.y) - (b.y - a.y) * (x - a.x);
}

bool in_triangle(double x, double y, Point a, Point b, Point c) {
    const double s0 = edge_side(x, y, a, b);
    const double s1 = edge_side(x, y, b, c);
    const double s2 = edge_side(x, y, c, a);
    const bool any_neg = s0 < 0 || s1 < 0 || s2 < 0;
    const bool any_pos = s0 > 0 || s1 > 0 || s2 > 0;
    return !(any_neg && any_pos);
}

// Dog filter sprite: floppy ears at the canvas top and a pale snout with a
// dark nose over the anchor near the bottom. Ear and snout colors are kept
// outside the warm-skin color range so the overlay never masquerades as face
// area to downstream pixel analysis.
ArAsset make_dog() {
    const int w = 260, h = 340;
    Canvas cv(w, h);
    const std::array<double, 3> ear{0.33, 0.21, 0.14};
    // Kept well above pupil-level darkness: the ears hang near the top of the
    // eye search region, and a near-black inner ear would register as a dark
    // eye-like cluster and drag the apparent eye position upward.
    const std::array<double, 3> ear_inner{0.28, 0.17, 0.13};
    const std::array<double, 3> snout{0.82, 0.80, 0.76};
    // Warm brown rather than near-black: the nose sits close to the eye
    // region, and a near-black patch there would read as eye-like darkness to
    // pixel analysis.
    const std::array<double, 3> nose{0.24, 0.17, 0.15};

    const Point l0{15, 100}, l1{70, 2}, l2{125, 80};
    const Point r0{245, 100}, r1{190, 2}, r2{135, 80};
    const Point li0{45, 85}, li1{72, 30}, li2{100, 72};
    const Point ri0{215, 85}, ri1{188, 30}, ri2{160, 72};

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double px = x + 0.5, py = y + 0.5;
            if (in_triangle(px, py, l0, l1, l2) || in_triangle(px, py, r0, r1, r2)) {
                cv.put(x, y, ear);
                if (in_triangle(px, py, li0, li1, li2) || in_triangle(px, py, ri0, ri1, ri2)) {
                    cv.put(x, y, ear_inner);
                }
            }
            if (in_ellipse(px, py, 130, 280, 118, 40)) cv.put(x, y, snout);
            if (in_ellipse(px, py, 130, 272, 40, 24)) cv.put(x, y, nose);
        }
    }

    ArAsset asset;
    asset.rgb = std::move(cv.rgb);
    asset.alpha = std::move(cv.alpha);
    asset.kind = "nose";
    asset.nose_anchor = {130.0, 300.0};
    return asset;
}

// Sunglasses: dark lenses, bridge, and temple arms, all one color — a fully
// opaque blend must leave zero luminance structure inside the covered region,
// so the asset itself carries none. The same asset serves both shades
// variants; only the blend opacity differs.
ArAsset make_shades() {
    const int w = 400, h = 140;
    Canvas cv(w, h);
    const std::array<double, 3> lens{0.10, 0.10, 0.11};

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double px = x + 0.5, py = y + 0.5;
            if ((px >= 148 && px <= 252 && py >= 60 && py <= 74) ||
                (px >= 10 && px <= 52 && py >= 62 && py <= 76) ||
                (px >= 348 && px <= 390 && py >= 62 && py <= 76)) {
                cv.put(x, y, lens);
            }
            for (const double hx : {100.0, 300.0}) {
                if (in_ellipse(px, py, hx, 70, 60, 43)) cv.put(x, y, lens);
            }
        }
    }

    ArAsset asset;
    asset.rgb = std::move(cv.rgb);
    asset.alpha = std::move(cv.alpha);
    asset.kind = "eye_pair";
    asset.left_anchor = {100.0, 70.0};
    asset.right_anchor = {300.0, 70.0};
    return asset;
}

// Transparent glasses: a pure-black frame ring around each eye hole plus
// bridge and arms; lens interiors carry zero alpha so the pixels underneath
// pass through untouched.
ArAsset make_glasses() {
    const int w = 400, h = 140;
    Canvas cv(w, h);
    const std::array<double, 3> frame{0.0, 0.0, 0.0};

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double px = x + 0.5, py = y + 0.5;
            if ((px >= 148 && px <= 252 && py >= 62 && py <= 74) ||
                (px >= 10 && px <= 52 && py >= 62 && py <= 76) ||
                (px >= 348 && px <= 390 && py >= 62 && py <= 76)) {
                cv.put(x, y, frame);
            }
            for (const double hx : {100.0, 300.0}) {
                if (in_ellipse(px, py, hx, 70, 60, 43) && !in_ellipse(px, py, hx, 70, 52, 36)) {
                    cv.put(x, y, frame);
                }
            }
        }
    }

    ArAsset asset;
    asset.rgb = std::move(cv.rgb);
    asset.alpha = std::move(cv.alpha);
    asset.kind = "eye_pair";
    asset.left_anchor = {100.0, 70.0};
    asset.right_anchor = {300.0, 70.0};
    return asset;
}

} // namespace

ArAsset make_ar_asset(const std::string& asset_name) {
    if (asset_name == "dog") return make_dog();
    if (asset_name == "shades") return make_shades();
    if (asset_name == "glasses") return make_glasses();
    throw RegistryError("Unknown AR asset '" + asset_name +
                        "'; valid assets: dog, glasses, shades");
}

void save_ar_asset(const ArAsset& asset, const std::string& png_path,
                   const std::string& json_path) {
    write_file_bytes(png_path, encode_png_rgba(asset.rgb, asset.alpha));
    nlohmann::json meta;
    meta["kind"] = asset.kind;
    if (asset.kind == "eye_pair") {
        meta["left_anchor"] = {asset.left_anchor.x, asset.left_anchor.y};
        meta["right_anchor"] = {asset.right_anchor.x, asset.right_anchor.y};
    } else {
        meta["nose_anchor"] = {asset.nose_anchor.x, asset.nose_anchor.y};
    }
    const std::string text = meta.dump(2) + "\n";
    write_file_bytes(json_path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

ArAsset load_ar_asset(const std::string& png_path, const std::string& json_path) {
    const RgbaImage rgba = decode_image_rgba(read_file_bytes(png_path));
    const std::vector<std::uint8_t> meta_bytes = read_file_bytes(json_path);
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(meta_bytes.begin(), meta_bytes.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw IoError("Overlay metadata " + json_path + " is not valid JSON: " + e.what());
    }

    ArAsset asset;
    asset.rgb = rgba.rgb;
    asset.alpha = rgba.alpha;
    try {
        asset.kind = meta.at("kind").get<std::string>();
        if (asset.kind == "eye_pair") {
            asset.left_anchor = {meta.at("left_anchor")[0].get<double>(),
                                 meta.at("left_anchor")[1].get<double>()};
            asset.right_anchor = {meta.at("right_anchor")[0].get<double>(),
                                  meta.at("right_anchor")[1].get<double>()};
        } else if (asset.kind == "nose") {
            asset.nose_anchor = {meta.at("nose_anchor")[0].get<double>(),
                                 meta.at("nose_anchor")[1].get<double>()};
        } else {
            throw IoError("Overlay metadata " + json_path + " has unknown kind '" + asset.kind +
                          "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw IoError("Overlay metadata " + json_path + " is missing required fields: " +
                      e.what());
    }
    return asset;
}

} // namespace facebench::filter
