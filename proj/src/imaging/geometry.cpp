#include "facebench/imaging/geometry.hpp"

#include <cmath>

namespace facebench {

Affine Affine::inverse() const {
    const double det = a * d - b * c;
    if (std::abs(det) < 1e-12)
        throw ContractViolation("affine transform is singular");
    Affine inv;
    inv.a = d / det;
    inv.b = -b / det;
    inv.c = -c / det;
    inv.d = a / det;
    inv.tx = -(inv.a * tx + inv.b * ty);
    inv.ty = -(inv.c * tx + inv.d * ty);
    return inv;
}

Affine Affine::similarity(double scale, double angle, double tx, double ty) {
    Affine t;
    t.a = scale * std::cos(angle);
    t.b = -scale * std::sin(angle);
    t.c = scale * std::sin(angle);
    t.d = scale * std::cos(angle);
    t.tx = tx;
    t.ty = ty;
    return t;
}

namespace {

double sample_plane(const float* data, int w, int h, int stride, int offset, double x, double y) {
    const double cx = std::min(std::max(x, 0.0), static_cast<double>(w - 1));
    const double cy = std::min(std::max(y, 0.0), static_cast<double>(h - 1));
    const int x0 = static_cast<int>(std::floor(cx));
    const int y0 = static_cast<int>(std::floor(cy));
    const int x1 = std::min(x0 + 1, w - 1);
    const int y1 = std::min(y0 + 1, h - 1);
    const double fx = cx - x0;
    const double fy = cy - y0;
    auto at = [&](int xx, int yy) {
        return static_cast<double>(data[(static_cast<std::size_t>(yy) * w + xx) * stride + offset]);
    };
    const double top = at(x0, y0) * (1.0 - fx) + at(x1, y0) * fx;
    const double bot = at(x0, y1) * (1.0 - fx) + at(x1, y1) * fx;
    return top * (1.0 - fy) + bot * fy;
}

} // namespace

double bilinear_sample(const Image& img, double x, double y, int channel) {
    return sample_plane(img.data().data(), img.width(), img.height(), 3, channel, x, y);
}

Image crop_resize(const Image& img, const Rect& box, int out_size) {
    if (out_size < 1)
        throw ContractViolation("crop_resize: out_size must be >= 1");
    Rect b;
    b.x0 = std::max(box.x0, 0.0);
    b.y0 = std::max(box.y0, 0.0);
    b.x1 = std::min(box.x1, static_cast<double>(img.width()));
    b.y1 = std::min(box.y1, static_cast<double>(img.height()));
    if (b.x1 - b.x0 <= 0.0 || b.y1 - b.y0 <= 0.0)
        throw ContractViolation("crop_resize: box does not intersect the image");

    Image out(out_size, out_size);
    const double sx = b.width() / out_size;
    const double sy = b.height() / out_size;
    for (int y = 0; y < out_size; ++y) {
        for (int x = 0; x < out_size; ++x) {
            // Pixel-center mapping; identity when the box spans whole pixels
            // at unit scale.
            const double src_x = b.x0 + (x + 0.5) * sx - 0.5;
            const double src_y = b.y0 + (y + 0.5) * sy - 0.5;
            for (int c = 0; c < 3; ++c)
                out.at(x, y, c) = static_cast<float>(bilinear_sample(img, src_x, src_y, c));
        }
    }
    return out;
}

Image resize(const Image& img, int out_w, int out_h) {
    if (out_w < 1 || out_h < 1)
        throw ContractViolation("resize: output dims must be >= 1");
    Image out(out_w, out_h);
    const double sx = static_cast<double>(img.width()) / out_w;
    const double sy = static_cast<double>(img.height()) / out_h;
    for (int y = 0; y < out_h; ++y) {
        for (int x = 0; x < out_w; ++x) {
            const double src_x = (x + 0.5) * sx - 0.5;
            const double src_y = (y + 0.5) * sy - 0.5;
            for (int c = 0; c < 3; ++c)
                out.at(x, y, c) = static_cast<float>(bilinear_sample(img, src_x, src_y, c));
        }
    }
    return out;
}

Mask warp_alpha(const std::vector<float>& asset_alpha, int asset_w, int asset_h,
                const Affine& affine, int out_w, int out_h) {
    Mask mask(out_w, out_h, 0.0);
    const Affine inv = affine.inverse();
    for (int y = 0; y < out_h; ++y) {
        for (int x = 0; x < out_w; ++x) {
            const Point q = inv.apply({static_cast<double>(x), static_cast<double>(y)});
            // Support equals the transformed asset footprint: outside the
            // canvas coverage is exactly zero, no edge clamping.
            if (q.x < -0.5 || q.y < -0.5 || q.x > asset_w - 0.5 || q.y > asset_h - 0.5)
                continue;
            const double v =
                sample_plane(asset_alpha.data(), asset_w, asset_h, 1, 0, q.x, q.y);
            mask.at(x, y) = static_cast<float>(std::min(1.0, std::max(0.0, v)));
        }
    }
    return mask;
}

Image alpha_blend(const Image& src, const Image& asset, const Placement& placement, double alpha) {
    if (placement.mask.width() != src.width() || placement.mask.height() != src.height())
        throw ContractViolation("alpha_blend: placement mask dimensions must match source image");
    if (alpha < 0.0 || alpha > 1.0)
        throw ContractViolation("alpha_blend: alpha must be in [0,1]");

    Image out = src;
    const Affine inv = placement.affine.inverse();
    for (int y = 0; y < src.height(); ++y) {
        for (int x = 0; x < src.width(); ++x) {
            const double m = placement.mask.at(x, y);
            const double am = alpha * m;
            if (am <= 0.0) continue;
            const Point q = inv.apply({static_cast<double>(x), static_cast<double>(y)});
            for (int c = 0; c < 3; ++c) {
                const double a = bilinear_sample(asset, q.x, q.y, c);
                const double s = src.at(x, y, c);
                out.at(x, y, c) = static_cast<float>(am * a + (1.0 - am) * s);
            }
        }
    }
    return out;
}

Image analytic_deblend(const Image& img, const Image& asset, const Placement& placement,
                       double alpha) {
    if (alpha >= 1.0)
        throw ContractViolation("analytic_deblend: alpha must be < 1 (alpha=1 is non-invertible)");
    if (alpha < 0.0)
        throw ContractViolation("analytic_deblend: alpha must be >= 0");
    if (placement.mask.width() != img.width() || placement.mask.height() != img.height())
        throw ContractViolation("analytic_deblend: placement mask dimensions must match image");

    Image out = img;
    const Affine inv = placement.affine.inverse();
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            // Only full-coverage pixels are inverted; partial coverage keeps
            // the observed value.
            if (placement.mask.at(x, y) < 0.999f) continue;
            const Point q = inv.apply({static_cast<double>(x), static_cast<double>(y)});
            for (int c = 0; c < 3; ++c) {
                const double a = bilinear_sample(asset, q.x, q.y, c);
                const double v = img.at(x, y, c);
                const double s = (v - alpha * a) / (1.0 - alpha);
                out.at(x, y, c) = static_cast<float>(std::min(1.0, std::max(0.0, s)));
            }
        }
    }
    return out;
}

} // namespace facebench
