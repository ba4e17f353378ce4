#include <algorithm>
#include <cmath>
#include <filesystem>
#include <memory>

#include "facebench/core/error.hpp"
#include "facebench/detect/analyzer.hpp"

namespace facebench::detect {

namespace {

// Warm-skin color rule: red leads green, green leads blue, and red is bright
// enough. Chosen so rendered skin passes under the full lighting-jitter range
// while backgrounds, hair, overlay sprites, and lens glass all fail.
constexpr double kSkinRedGreenMin = 0.03;
constexpr double kSkinGreenBlueMin = 0.005;
constexpr double kSkinRedMin = 0.35;

// Candidate regions must cover this fraction of the frame. High enough that
// slivers severed from a face by an occluding band (e.g. a forehead strip cut
// off by sunglasses) never compete as candidates of their own.
constexpr double kMinAreaFrac = 0.06;

// Eye-region darkness analysis.
constexpr double kDarkOffset = 0.10;   // dark = within this of the band minimum
constexpr double kDarkGate = 0.35;     // band minimum above this → no eye evidence
constexpr double kCompactFrac = 0.0045; // clusters up to this frame fraction are pupil-like
constexpr double kRingContrastNorm = 0.25; // normalizes surround-vs-cluster contrast
constexpr double kSpreadNorm = 0.04;       // normalizes in-cluster luminance spread

// Mouth redness rule.
constexpr double kMouthRedGreenMin = 0.15;
constexpr double kMouthRedMin = 0.45;
constexpr int kMouthCountFull = 12;

// Skin brightness normalization and evidence weights.
constexpr double kSkinLumaLo = 0.55;
constexpr double kSkinLumaRange = 0.30;
constexpr double kSkinW = 0.30;
constexpr double kMouthW = 0.35;
constexpr double kEyeW = 0.35;
constexpr double kAcceptScore = 0.52;

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

struct SideCluster {
    long count = 0;
    double sum_x = 0.0, sum_y = 0.0, sum_lum = 0.0;
    int x0 = 1 << 30, y0 = 1 << 30, x1 = -1, y1 = -1;
    std::vector<float> lums;

    void add(int x, int y, double lum) {
        ++count;
        sum_x += x + 0.5;
        sum_y += y + 0.5;
        sum_lum += lum;
        x0 = std::min(x0, x);
        y0 = std::min(y0, y);
        x1 = std::max(x1, x);
        y1 = std::max(y1, y);
        lums.push_back(static_cast<float>(lum));
    }
};

class PixelRuleAnalyzer final : public FaceAnalyzer {
public:
    std::string id() const override { return "bundled"; }
    std::string version() const override { return "bundled-1.0"; }

    std::vector<FaceCandidate> detect(const Image& img) const override;
    std::optional<filter::LandmarkSet> landmarks(const Image& img) const override;
};

double luma_at(const Image& img, int x, int y) {
    return 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) + 0.114 * img.at(x, y, 2);
}

bool is_skin(const Image& img, int x, int y) {
    const double r = img.at(x, y, 0);
    const double g = img.at(x, y, 1);
    const double b = img.at(x, y, 2);
    return (r - g) >= kSkinRedGreenMin && (g - b) >= kSkinGreenBlueMin && r >= kSkinRedMin;
}

bool is_mouth_red(const Image& img, int x, int y) {
    const double r = img.at(x, y, 0);
    const double g = img.at(x, y, 1);
    return (r - g) >= kMouthRedGreenMin && r >= kMouthRedMin;
}

double quantile(std::vector<float>& v, double q) {
    // Index-based quantile on the sorted sample; exact and deterministic.
    std::sort(v.begin(), v.end());
    const double pos = q * (static_cast<double>(v.size()) - 1.0);
    return v[static_cast<std::size_t>(std::llround(pos))];
}

// Evidence that a dark cluster is (or hides) an eye. Pupil-sized clusters earn
// full marks when their surroundings are much brighter; large clusters (lenses,
// frames) earn credit for internal luminance structure — an opaque lens is
// uniform, a translucent one carries an attenuated imprint of what is behind
// it.
double side_evidence(const Image& img, const SideCluster& side, double dark_thr,
                     double compact_limit) {
    if (side.count < 2) return 0.0;
    if (side.count <= compact_limit) {
        const int rx0 = std::max(0, side.x0 - 3);
        const int ry0 = std::max(0, side.y0 - 3);
        const int rx1 = std::min(img.width() - 1, side.x1 + 3);
        const int ry1 = std::min(img.height() - 1, side.y1 + 3);
        double ring_sum = 0.0;
        long ring_n = 0;
        for (int y = ry0; y <= ry1; ++y) {
            for (int x = rx0; x <= rx1; ++x) {
                const double lum = luma_at(img, x, y);
                if (lum < dark_thr) continue;
                ring_sum += lum;
                ++ring_n;
            }
        }
        if (ring_n == 0) return 0.0;
        const double ring_mean = ring_sum / ring_n;
        const double dark_mean = side.sum_lum / side.count;
        return clamp01((ring_mean - dark_mean) / kRingContrastNorm);
    }
    // Spread between the 90th percentile and the minimum. Partial-coverage
    // pixels at a blended overlay's rim mix toward the brighter surroundings,
    // polluting only the top tail — the percentile shuts them out — while the
    // minimum rests on the darkest structure, which has multi-pixel support in
    // every cluster this branch sees.
    std::vector<float> lums = side.lums;
    const double spread = quantile(lums, 0.90) - quantile(lums, 0.0);
    return clamp01(spread / kSpreadNorm);
}

std::vector<FaceCandidate> PixelRuleAnalyzer::detect(const Image& img) const {
    std::vector<FaceCandidate> out;
    if (img.empty()) return out;
    const int w = img.width();
    const int h = img.height();
    const std::size_t n = static_cast<std::size_t>(w) * h;
    const long min_area = static_cast<long>(kMinAreaFrac * static_cast<double>(n));
    const double compact_limit = kCompactFrac * static_cast<double>(n);

    std::vector<std::uint8_t> skin(n, 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (is_skin(img, x, y)) skin[static_cast<std::size_t>(y) * w + x] = 1;

    // Connected components (4-neighborhood) over the skin mask.
    std::vector<std::int32_t> label(n, -1);
    std::vector<std::size_t> stack;
    std::int32_t next_label = 0;
    for (std::size_t start = 0; start < n; ++start) {
        if (!skin[start] || label[start] >= 0) continue;
        const std::int32_t comp = next_label++;
        label[start] = comp;
        stack.assign(1, start);

        long area = 0;
        double sum_x = 0.0, sum_y = 0.0, sum_lum = 0.0;
        int bx0 = w, by0 = h, bx1 = -1, by1 = -1;
        while (!stack.empty()) {
            const std::size_t idx = stack.back();
            stack.pop_back();
            const int x = static_cast<int>(idx % w);
            const int y = static_cast<int>(idx / w);
            ++area;
            sum_x += x + 0.5;
            sum_y += y + 0.5;
            sum_lum += luma_at(img, x, y);
            bx0 = std::min(bx0, x);
            by0 = std::min(by0, y);
            bx1 = std::max(bx1, x);
            by1 = std::max(by1, y);
            const std::size_t neighbors[4] = {idx - 1, idx + 1, idx - w, idx + w};
            if (x > 0 && skin[neighbors[0]] && label[neighbors[0]] < 0) {
                label[neighbors[0]] = comp;
                stack.push_back(neighbors[0]);
            }
            if (x + 1 < w && skin[neighbors[1]] && label[neighbors[1]] < 0) {
                label[neighbors[1]] = comp;
                stack.push_back(neighbors[1]);
            }
            if (y > 0 && skin[neighbors[2]] && label[neighbors[2]] < 0) {
                label[neighbors[2]] = comp;
                stack.push_back(neighbors[2]);
            }
            if (y + 1 < h && skin[neighbors[3]] && label[neighbors[3]] < 0) {
                label[neighbors[3]] = comp;
                stack.push_back(neighbors[3]);
            }
        }
        if (area < min_area) continue;

        FaceCandidate cand;
        const double bw = bx1 - bx0 + 1;
        const double bh = by1 - by0 + 1;
        cand.centroid = {sum_x / area, sum_y / area};
        cand.skin_term = clamp01((sum_lum / area - kSkinLumaLo) / kSkinLumaRange);

        // Mouth: red cluster in the lower part of the region.
        {
            const int my0 = static_cast<int>(cand.centroid.y + 0.05 * bh);
            long count = 0;
            double mx = 0.0, my = 0.0;
            for (int y = std::max(by0, my0); y <= by1; ++y) {
                for (int x = bx0; x <= bx1; ++x) {
                    if (!is_mouth_red(img, x, y)) continue;
                    ++count;
                    mx += x + 0.5;
                    my += y + 0.5;
                }
            }
            cand.mouth_term = std::min(1.0, static_cast<double>(count) / kMouthCountFull);
            cand.has_mouth = count > 0;
            cand.mouth_center = cand.has_mouth
                                    ? Point{mx / count, my / count}
                                    : Point{cand.centroid.x, by0 + 0.72 * bh};
        }

        // Eyes: darkness structure in the band between forehead and centroid.
        // The search reaches slightly above the component box: an occluder
        // lying across the eyes can sever the forehead from the region below,
        // leaving a box whose top edge sits under the occluder — the eye rows
        // are then at or above the box top rather than inside it.
        {
            const int ey0 = std::max(0, static_cast<int>(by0 - 0.15 * bh));
            const int ey1 = std::min(by1, static_cast<int>(cand.centroid.y - 0.03 * bh));
            double band_min = 1.0;
            for (int y = ey0; y <= ey1; ++y)
                for (int x = bx0; x <= bx1; ++x) band_min = std::min(band_min, luma_at(img, x, y));

            double evidence = 0.0;
            bool has_eyes = false;
            Point le{cand.centroid.x - 0.19 * bw, by0 + 0.30 * bh};
            Point re{cand.centroid.x + 0.19 * bw, by0 + 0.30 * bh};
            if (ey1 >= ey0 && band_min <= kDarkGate) {
                const double dark_thr = band_min + kDarkOffset;
                SideCluster left, right;
                for (int y = ey0; y <= ey1; ++y) {
                    for (int x = bx0; x <= bx1; ++x) {
                        const double lum = luma_at(img, x, y);
                        if (lum >= dark_thr) continue;
                        (x + 0.5 < cand.centroid.x ? left : right).add(x, y, lum);
                    }
                }
                if (left.count >= 2 && right.count >= 2) {
                    const Point lc{left.sum_x / left.count, left.sum_y / left.count};
                    const Point rc{right.sum_x / right.count, right.sum_y / right.count};
                    const double dx = rc.x - lc.x;
                    const double dy = std::abs(rc.y - lc.y);
                    if (dx >= 0.15 * bw && dx <= 0.65 * bw && dy <= 0.35 * dx + 2.0) {
                        evidence = std::min(side_evidence(img, left, dark_thr, compact_limit),
                                            side_evidence(img, right, dark_thr, compact_limit));
                        has_eyes = true;
                        le = lc;
                        re = rc;
                    }
                }
            }
            cand.eye_term = evidence;
            cand.has_eyes = has_eyes;
            cand.left_eye = le;
            cand.right_eye = re;
        }

        cand.score = kSkinW * cand.skin_term + kMouthW * cand.mouth_term + kEyeW * cand.eye_term;
        cand.box = Rect{std::max(0.0, bx0 - 0.08 * bw), std::max(0.0, by0 - 0.08 * bh),
                        std::min<double>(w, bx1 + 1 + 0.08 * bw),
                        std::min<double>(h, by1 + 1 + 0.08 * bh)};
        out.push_back(std::move(cand));
    }

    std::sort(out.begin(), out.end(), [](const FaceCandidate& a, const FaceCandidate& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.box.x0 < b.box.x0;
    });
    return out;
}

// Build a full landmark set from the detected anchors. Only the eye centroids
// and nose-tip centroid feed overlay placement; the remaining groups are
// proportional scaffolding that keeps the 68-point layout convention.
std::optional<filter::LandmarkSet> PixelRuleAnalyzer::landmarks(const Image& img) const {
    const std::vector<FaceCandidate> cands = detect(img);
    const FaceCandidate* best = nullptr;
    for (const FaceCandidate& c : cands)
        if (c.score >= kAcceptScore && !best) best = &c;
    if (!best) return std::nullopt;

    const Point le = best->left_eye;
    const Point re = best->right_eye;
    double d = std::hypot(re.x - le.x, re.y - le.y);
    const double bw = best->box.width();
    if (d < 1e-6) d = 0.36 * bw;
    const double ux = (re.x - le.x) / d;
    const double uy = (re.y - le.y) / d;
    // v is u rotated 90 degrees clockwise: points toward the chin.
    const double vx = -uy;
    const double vy = ux;
    const Point mid{0.5 * (le.x + re.x), 0.5 * (le.y + re.y)};
    const Point mouth = best->has_mouth ? best->mouth_center
                                        : Point{mid.x + 1.04 * d * vx, mid.y + 1.04 * d * vy};
    const Point nose{mid.x + 0.55 * (mouth.x - mid.x), mid.y + 0.55 * (mouth.y - mid.y)};
    const double eye_r = 0.155 * d;

    auto at = [&](Point origin, double along, double down) {
        return Point{origin.x + along * ux + down * vx, origin.y + along * uy + down * vy};
    };

    filter::LandmarkSet lm;
    const double chin_r = 1.45 * d;
    for (int i = 0; i < 17; ++i) {
        const double phi = (0.20 + 0.60 * (i / 16.0)) * M_PI;
        lm.chin.push_back(at(mid, chin_r * std::cos(phi), chin_r * std::sin(phi)));
    }
    for (int i = 0; i < 5; ++i) {
        const double t = i / 4.0 - 0.5;
        lm.left_eyebrow.push_back(at(le, 2.3 * eye_r * t, -1.9 * eye_r));
        lm.right_eyebrow.push_back(at(re, 2.3 * eye_r * t, -1.9 * eye_r));
    }
    for (int i = 0; i < 4; ++i) {
        const double t = 0.35 + 0.55 * (i / 3.0);
        lm.nose_bridge.push_back(
            {mid.x + t * (nose.x - mid.x), mid.y + t * (nose.y - mid.y)});
    }
    for (int i = 0; i < 5; ++i) {
        const double t = i / 4.0 - 0.5;
        lm.nose_tip.push_back(at(nose, 4.8 * (d / 34.6) * t, 0.0));
    }
    const double hex[6][2] = {{-1.15, 0.0}, {-0.45, -0.62}, {0.45, -0.62},
                              {1.15, 0.0},  {0.45, 0.62},   {-0.45, 0.62}};
    for (const auto& o : hex) lm.left_eye.push_back(at(le, o[0] * eye_r, o[1] * eye_r));
    for (const auto& o : hex) lm.right_eye.push_back(at(re, o[0] * eye_r, o[1] * eye_r));
    // Lip groups in 68-point style: 7-point outer arc plus 5-point inner arc
    // per lip, with the outer and inner corners shared between the lips so the
    // 24 entries cover 20 distinct points.
    const double lip_rx = 0.38 * d;
    const double lip_ry = 0.11 * d;
    const double lip_irx = 0.92 * lip_rx;
    const double lip_iry = 0.92 * lip_ry;
    lm.top_lip.push_back(at(mouth, -lip_rx, 0.0));
    for (int i = 1; i < 6; ++i) {
        const double t = M_PI * (i / 6.0);
        lm.top_lip.push_back(at(mouth, -lip_rx * std::cos(t), -lip_ry * std::sin(t)));
    }
    lm.top_lip.push_back(at(mouth, lip_rx, 0.0));
    lm.top_lip.push_back(at(mouth, lip_irx, 0.0));
    for (int i = 1; i < 4; ++i) {
        const double t = M_PI * (i / 4.0);
        lm.top_lip.push_back(at(mouth, lip_irx * std::cos(t), -lip_iry * std::sin(t)));
    }
    lm.top_lip.push_back(at(mouth, -lip_irx, 0.0));
    lm.bottom_lip.push_back(at(mouth, lip_rx, 0.0));
    for (int i = 1; i < 6; ++i) {
        const double t = M_PI * (i / 6.0);
        lm.bottom_lip.push_back(at(mouth, lip_rx * std::cos(t), lip_ry * std::sin(t)));
    }
    lm.bottom_lip.push_back(at(mouth, -lip_rx, 0.0));
    lm.bottom_lip.push_back(at(mouth, -lip_irx, 0.0));
    for (int i = 1; i < 4; ++i) {
        const double t = M_PI * (i / 4.0);
        lm.bottom_lip.push_back(at(mouth, -lip_irx * std::cos(t), lip_iry * std::sin(t)));
    }
    lm.bottom_lip.push_back(at(mouth, lip_irx, 0.0));
    clamp_to_bounds(lm, img.width(), img.height());
    return lm;
}

const std::shared_ptr<const FaceAnalyzer>& bundled_analyzer() {
    static const std::shared_ptr<const FaceAnalyzer> instance =
        std::make_shared<PixelRuleAnalyzer>();
    return instance;
}

} // namespace

std::shared_ptr<const FaceAnalyzer> make_analyzer(const std::string& adapter_id,
                                                  const std::string& model_root) {
    if (adapter_id == "bundled") return bundled_analyzer();
    const std::string path = model_root + "/" + adapter_id + ".weights";
    if (!std::filesystem::exists(path))
        throw ConfigError("Face analyzer adapter '" + adapter_id +
                          "' requires model weights at " + path + ", which does not exist");
    throw ConfigError("Face analyzer adapter '" + adapter_id + "' has weights at " + path +
                      " but no loader is registered in this build");
}

std::vector<FaceCandidate> detect_faces(const Image& img) {
    return bundled_analyzer()->detect(img);
}

SingleFaceResult detect_single_face(const Image& img) {
    SingleFaceResult result;
    const std::vector<FaceCandidate> cands = detect_faces(img);
    std::vector<const FaceCandidate*> accepted;
    for (const FaceCandidate& c : cands)
        if (c.score >= kAcceptScore) accepted.push_back(&c);
    if (accepted.empty()) {
        result.rejection = "none";
    } else if (accepted.size() > 1) {
        result.rejection = "multiple(" + std::to_string(accepted.size()) + ")";
    } else {
        result.box = accepted.front()->box;
    }
    return result;
}

std::optional<filter::LandmarkSet> detect_landmarks(const Image& img) {
    return bundled_analyzer()->landmarks(img);
}

} // namespace facebench::detect
