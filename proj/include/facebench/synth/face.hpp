#ifndef FACEBENCH_SYNTH_FACE_HPP
#define FACEBENCH_SYNTH_FACE_HPP

#include <array>

#include "facebench/core/rng.hpp"
#include "facebench/filter/landmarks.hpp"
#include "facebench/imaging/image.hpp"

namespace facebench::synth {

// Per-identity appearance: geometry as fractions of the canvas, colors as RGB
// in [0,1]. Ranges are chosen so that skin, hair, background, and features
// stay on the correct sides of the pixel-analysis detector's color tests even
// under the worst lighting jitter.
struct IdentityParams {
    double face_rx = 0.32;  // face ellipse semi-axes, fraction of width/height
    double face_ry = 0.40;
    double eye_dx = 0.18;   // eye center offset from face center, fraction of W
    double eye_dy = 0.12;   // above face center, fraction of H
    double eye_r = 0.054;   // eye radius, fraction of W
    double brow_dy = 1.9;   // brow center above eye center, multiples of eye_r
    double nose_dy = 0.09;  // nose tip below face center, fraction of H
    double mouth_dy = 0.255; // mouth center below face center, fraction of H
    double mouth_w = 0.27;  // mouth ellipse axes, fraction of W / H
    double mouth_h = 0.08;
    double hair_cap = 0.45; // fraction of face_ry covered by the hair cap

    std::array<double, 3> skin{0.85, 0.77, 0.70};
    std::array<double, 3> hair{0.25, 0.22, 0.20};
    std::array<double, 3> brow{0.26, 0.23, 0.22};
    std::array<double, 3> iris{0.30, 0.45, 0.60};
    std::array<double, 3> mouth{0.70, 0.32, 0.38};
    std::array<double, 3> background{0.42, 0.50, 0.60};
};

// Per-image capture conditions.
struct ImageJitter {
    double dx = 0.0;    // pixels
    double dy = 0.0;
    double angle = 0.0; // radians
    double scale = 1.0;
    double gain = 1.0;  // lighting: out = gain*color + bias
    double bias = 0.0;
};

IdentityParams sample_identity(Rng& rng);
ImageJitter sample_jitter(Rng& rng);

struct RenderResult {
    Image image;
    filter::LandmarkSet landmarks;
};

// Deterministic analytic rasterization: every pixel is classified in face
// coordinates through the inverse jitter transform, so there is no resampling
// and landmark ground truth is exact by construction.
RenderResult render_face(const IdentityParams& id, const ImageJitter& jitter, int width,
                         int height);

// The jitter similarity mapping canonical canvas coordinates to image
// coordinates (exposed for landmark ground-truth checks).
Affine jitter_transform(const ImageJitter& jitter, int width, int height);

} // namespace facebench::synth

#endif
