#ifndef FACEBENCH_IMAGING_GEOMETRY_HPP
#define FACEBENCH_IMAGING_GEOMETRY_HPP

#include <array>
#include <optional>

#include "facebench/imaging/image.hpp"

namespace facebench {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct Rect {
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
};

// 2x3 affine transform mapping asset coordinates to image coordinates:
//   (x', y') = (a*x + b*y + tx, c*x + d*y + ty)
struct Affine {
    double a = 1.0, b = 0.0, tx = 0.0;
    double c = 0.0, d = 1.0, ty = 0.0;

    Point apply(Point p) const { return {a * p.x + b * p.y + tx, c * p.x + d * p.y + ty}; }

    Affine inverse() const;

    // Similarity transform: rotate by angle, scale, then translate.
    static Affine similarity(double scale, double angle, double tx, double ty);
};

// Warped-asset placement: affine maps asset pixels into the target image, the
// mask holds per-pixel coverage over the target (the warped asset alpha).
struct Placement {
    Affine affine;
    Mask mask;
};

// Bilinear sample with edge clamping; 4-channel variant reads RGB + alpha.
double bilinear_sample(const Image& img, double x, double y, int channel);

// Bounds-clipped crop followed by bilinear resample to out_size x out_size.
// Throws ContractViolation when the box does not intersect the image.
Image crop_resize(const Image& img, const Rect& box, int out_size);

Image resize(const Image& img, int out_w, int out_h);

// out(p) = alpha*mask(p)*asset'(p) + (1 - alpha*mask(p))*src(p) where asset'
// is the asset warped through placement.affine. Pixels with zero mask are
// returned unchanged, bit-exactly.
Image alpha_blend(const Image& src, const Image& asset, const Placement& placement, double alpha);

// Exact inverse of alpha_blend on full-mask pixels for alpha < 1:
//   src_hat = (img - alpha*asset') / (1 - alpha), clamped to [0,1].
// Partially-covered and uncovered pixels are returned unchanged.
Image analytic_deblend(const Image& img, const Image& asset, const Placement& placement,
                       double alpha);

// Warp the asset alpha channel into target-image space, producing the
// placement mask. Alpha is stored as a separate plane alongside asset RGB.
Mask warp_alpha(const std::vector<float>& asset_alpha, int asset_w, int asset_h,
                const Affine& affine, int out_w, int out_h);

} // namespace facebench

#endif
