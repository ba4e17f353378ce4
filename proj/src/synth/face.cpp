#include "facebench/synth/face.hpp"

#include <algorithm>
#include <cmath>

namespace facebench::synth {

namespace {

constexpr double kPi = 3.14159265358979323846;

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

double luma(const std::array<double, 3>& c) {
    return 0.299 * c[0] + 0.587 * c[1] + 0.114 * c[2];
}

// Ellipse membership in canonical coordinates.
bool in_ellipse(double x, double y, double cx, double cy, double rx, double ry) {
    const double nx = (x - cx) / rx;
    const double ny = (y - cy) / ry;
    return nx * nx + ny * ny <= 1.0;
}

} // namespace

IdentityParams sample_identity(Rng& rng) {
    IdentityParams p;
    p.face_rx = rng.uniform(0.30, 0.35);
    p.face_ry = rng.uniform(0.38, 0.43);
    p.eye_dx = rng.uniform(0.16, 0.20);
    p.eye_dy = rng.uniform(0.10, 0.14);
    p.eye_r = rng.uniform(0.048, 0.060);
    p.brow_dy = rng.uniform(1.7, 2.1);
    p.nose_dy = rng.uniform(0.08, 0.10);
    p.mouth_dy = rng.uniform(0.24, 0.27);
    p.mouth_w = rng.uniform(0.24, 0.30);
    p.mouth_h = rng.uniform(0.07, 0.09);
    p.hair_cap = rng.uniform(0.35, 0.55);

    // Skin: warm, bright; stays on the warm side of the detector's color tests
    // under lighting gain in [0.93, 1.05] and bias in [-0.03, 0.03].
    const double r = rng.uniform(0.78, 0.90);
    const double dg = rng.uniform(0.07, 0.13);
    const double db = rng.uniform(0.05, 0.12);
    p.skin = {r, r - dg, r - dg - db};

    // Hair: dark and near-neutral. Red channel is capped so hair never passes
    // the skin brightness gate even at maximum gain and bias, while the value
    // floor keeps hair clearly brighter than pupils even after the most
    // compressive tone curve, so hair never reads as eye-like darkness.
    const double hv = rng.uniform(0.21, 0.30);
    p.hair = {std::min(hv * rng.uniform(0.95, 1.05), 0.28), hv * rng.uniform(0.85, 1.0),
              hv * rng.uniform(0.80, 1.0)};
    p.brow = {std::min(p.hair[0] + 0.02, 0.28), p.hair[1] + 0.02, p.hair[2] + 0.02};

    // Iris palette: cool-to-warm spread across identities.
    const int palette = static_cast<int>(rng.below(3));
    if (palette == 0) {
        p.iris = {rng.uniform(0.20, 0.30), rng.uniform(0.40, 0.50), rng.uniform(0.55, 0.70)};
    } else if (palette == 1) {
        p.iris = {rng.uniform(0.25, 0.35), rng.uniform(0.48, 0.60), rng.uniform(0.28, 0.40)};
    } else {
        p.iris = {rng.uniform(0.40, 0.50), rng.uniform(0.26, 0.34), rng.uniform(0.16, 0.24)};
    }

    // Mouth: saturated red; large red-green margin survives every enhancement
    // filter's saturation floor.
    const double mr = rng.uniform(0.65, 0.78);
    p.mouth = {mr, mr - rng.uniform(0.30, 0.40), mr - rng.uniform(0.26, 0.36)};

    // Background: cool gradient base (red below green below blue) so it always
    // fails the warm skin test.
    const double bg = rng.uniform(0.35, 0.55);
    p.background = {bg, bg + rng.uniform(0.03, 0.10), bg + rng.uniform(0.07, 0.18)};
    return p;
}

ImageJitter sample_jitter(Rng& rng) {
    ImageJitter j;
    j.dx = rng.uniform(-3.0, 3.0);
    j.dy = rng.uniform(-3.0, 3.0);
    j.angle = rng.uniform(-0.07, 0.07);
    j.scale = rng.uniform(0.95, 1.05);
    j.gain = rng.uniform(0.93, 1.05);
    j.bias = rng.uniform(-0.03, 0.03);
    return j;
}

Affine jitter_transform(const ImageJitter& jitter, int width, int height) {
    const double cx = 0.5 * width;
    const double cy = 0.5 * height;
    // p_img = center + offset + s * R(theta) * (p_canonical - center)
    const Affine rot = Affine::similarity(jitter.scale, jitter.angle, 0.0, 0.0);
    const Point moved = rot.apply({cx, cy});
    return Affine{rot.a, rot.b, cx + jitter.dx - moved.x, rot.c, rot.d, cy + jitter.dy - moved.y};
}

RenderResult render_face(const IdentityParams& id, const ImageJitter& jitter, int width,
                         int height) {
    const double w = width;
    const double h = height;
    const double fcx = 0.5 * w;
    const double fcy = 0.52 * h;

    // Canonical feature geometry in canvas pixels.
    const double face_rx = id.face_rx * w;
    const double face_ry = id.face_ry * h;
    const double eye_y = fcy - id.eye_dy * h;
    const double eye_lx = fcx - id.eye_dx * w;
    const double eye_rx_c = fcx + id.eye_dx * w;
    const double eye_r = id.eye_r * w;
    const double brow_y = eye_y - id.brow_dy * eye_r;
    const double nose_y = fcy + id.nose_dy * h;
    const double nose_top = eye_y + 0.06 * h;
    const double mouth_y = fcy + id.mouth_dy * h;
    const double mouth_rx = 0.5 * id.mouth_w * w;
    const double mouth_ry = 0.5 * id.mouth_h * h;

    const Affine fwd = jitter_transform(jitter, width, height);
    const Affine inv = fwd.inverse();

    const std::array<double, 3> sclera{0.93, 0.93, 0.91};
    const std::array<double, 3> pupil{0.04, 0.04, 0.05};
    std::array<double, 3> nose_shade{id.skin[0] * 0.86, id.skin[1] * 0.86, id.skin[2] * 0.86};
    std::array<double, 3> lip_line{id.mouth[0] * 0.55, id.mouth[1] * 0.55, id.mouth[2] * 0.55};
    // Keep the inner lip line well above the pupil darkness threshold.
    if (luma(lip_line) < 0.18) {
        for (double& c : lip_line) c += 0.08;
    }

    Image img(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const Point pc = inv.apply({x + 0.5, y + 0.5});
            const double px = pc.x;
            const double py = pc.y;

            std::array<double, 3> color = id.background;
            // Soft vertical background shading keeps the background from being
            // a single flat color without affecting its hue ordering.
            const double shade = 1.0 - 0.10 * (py / h);
            for (double& c : color) c = clamp01(c * shade);

            if (in_ellipse(px, py, fcx, fcy, face_rx, face_ry)) {
                color = id.skin;

                // Hair cap across the top of the face ellipse.
                if (py < fcy - face_ry * (1.0 - id.hair_cap)) {
                    color = id.hair;
                }

                // Brows: horizontal bands above each eye.
                const double brow_hw = 1.15 * eye_r;
                const double brow_hh = 0.28 * eye_r;
                if (py >= brow_y - brow_hh && py <= brow_y + brow_hh) {
                    if (std::abs(px - eye_lx) <= brow_hw || std::abs(px - eye_rx_c) <= brow_hw) {
                        color = id.brow;
                    }
                }

                // Eyes: sclera almond, iris disc, pupil disc.
                for (const double ex : {eye_lx, eye_rx_c}) {
                    if (in_ellipse(px, py, ex, eye_y, 1.15 * eye_r, 0.80 * eye_r)) {
                        color = sclera;
                        const double dx = px - ex;
                        const double dy = py - eye_y;
                        const double d2 = dx * dx + dy * dy;
                        const double iris_r = 0.62 * eye_r;
                        const double pupil_r = 0.30 * eye_r;
                        if (d2 <= iris_r * iris_r) color = id.iris;
                        if (d2 <= pupil_r * pupil_r) color = pupil;
                    }
                }

                // Nose: narrow wedge from the bridge to the tip plus nostril
                // shading dots either side of the tip.
                if (py >= nose_top && py <= nose_y) {
                    const double t = (py - nose_top) / (nose_y - nose_top);
                    const double half_w = 0.6 + 2.0 * t;
                    if (std::abs(px - fcx) <= half_w) color = nose_shade;
                }
                for (const double sx : {-1.0, 1.0}) {
                    if (in_ellipse(px, py, fcx + sx * 2.4, nose_y - 0.4, 1.1, 0.8)) {
                        color = {nose_shade[0] * 0.82, nose_shade[1] * 0.82, nose_shade[2] * 0.82};
                    }
                }

                // Mouth: filled ellipse with a darker inner lip line.
                if (in_ellipse(px, py, fcx, mouth_y, mouth_rx, mouth_ry)) {
                    color = id.mouth;
                    if (std::abs(py - mouth_y) <= 0.55) color = lip_line;
                }
            }

            for (double& c : color) c = clamp01(jitter.gain * c + jitter.bias);
            img.set(x, y, color[0], color[1], color[2]);
        }
    }

    // Landmark ground truth: canonical feature points pushed through the
    // forward jitter transform.
    filter::LandmarkSet lm;
    auto push = [&fwd](std::vector<Point>& group, double x, double y) {
        group.push_back(fwd.apply({x, y}));
    };

    // Chin: 17 points along the lower face arc. Angles sweep the lower half of
    // the ellipse (image y grows downward, so sin > 0 is the jaw side).
    for (int i = 0; i < 17; ++i) {
        const double phi = (0.08 + 0.84 * (i / 16.0)) * kPi;
        push(lm.chin, fcx - face_rx * std::cos(phi), fcy + face_ry * std::sin(phi));
    }
    // Brows: 5 points across each band.
    for (int i = 0; i < 5; ++i) {
        const double t = i / 4.0 - 0.5;
        push(lm.left_eyebrow, eye_lx + 2.3 * eye_r * t, brow_y);
        push(lm.right_eyebrow, eye_rx_c + 2.3 * eye_r * t, brow_y);
    }
    // Nose bridge: 4 points down the midline.
    for (int i = 0; i < 4; ++i) {
        const double t = i / 3.0;
        push(lm.nose_bridge, fcx, nose_top + t * (nose_y - nose_top) * 0.85);
    }
    // Nose tip: 5 points across the nostril line; centroid is the tip itself.
    for (int i = 0; i < 5; ++i) {
        const double t = i / 4.0 - 0.5;
        push(lm.nose_tip, fcx + 4.8 * t, nose_y);
    }
    // Eyes: 6-point almond whose centroid is exactly the eye center.
    for (const double ex : {eye_lx, eye_rx_c}) {
        std::vector<Point>& eye = (ex < fcx) ? lm.left_eye : lm.right_eye;
        push(eye, ex - 1.15 * eye_r, eye_y);
        push(eye, ex - 0.45 * eye_r, eye_y - 0.62 * eye_r);
        push(eye, ex + 0.45 * eye_r, eye_y - 0.62 * eye_r);
        push(eye, ex + 1.15 * eye_r, eye_y);
        push(eye, ex + 0.45 * eye_r, eye_y + 0.62 * eye_r);
        push(eye, ex - 0.45 * eye_r, eye_y + 0.62 * eye_r);
    }
    // Lips, 68-point style: each lip lists its 7-point outer arc plus a
    // 5-point inner arc, and the two lips share the outer and inner mouth
    // corners (computed once, so the shared entries are bit-identical): the 24
    // entries span 20 distinct points, completing the 68 unique landmarks.
    {
        const double irx = 0.92 * mouth_rx;
        const double iry = 0.92 * mouth_ry;
        // Outer upper arc, left corner to right corner.
        push(lm.top_lip, fcx - mouth_rx, mouth_y);
        for (int i = 1; i < 6; ++i) {
            const double t = kPi * (i / 6.0);
            push(lm.top_lip, fcx - mouth_rx * std::cos(t), mouth_y - mouth_ry * std::sin(t));
        }
        push(lm.top_lip, fcx + mouth_rx, mouth_y);
        // Inner upper arc, right corner to left corner.
        push(lm.top_lip, fcx + irx, mouth_y);
        for (int i = 1; i < 4; ++i) {
            const double t = kPi * (i / 4.0);
            push(lm.top_lip, fcx + irx * std::cos(t), mouth_y - iry * std::sin(t));
        }
        push(lm.top_lip, fcx - irx, mouth_y);
        // Outer lower arc, right corner to left corner.
        push(lm.bottom_lip, fcx + mouth_rx, mouth_y);
        for (int i = 1; i < 6; ++i) {
            const double t = kPi * (i / 6.0);
            push(lm.bottom_lip, fcx + mouth_rx * std::cos(t), mouth_y + mouth_ry * std::sin(t));
        }
        push(lm.bottom_lip, fcx - mouth_rx, mouth_y);
        // Inner lower arc, left corner to right corner.
        push(lm.bottom_lip, fcx - irx, mouth_y);
        for (int i = 1; i < 4; ++i) {
            const double t = kPi * (i / 4.0);
            push(lm.bottom_lip, fcx - irx * std::cos(t), mouth_y + iry * std::sin(t));
        }
        push(lm.bottom_lip, fcx + irx, mouth_y);
    }

    return RenderResult{std::move(img), std::move(lm)};
}

} // namespace facebench::synth
