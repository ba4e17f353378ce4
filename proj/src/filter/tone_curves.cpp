#include "facebench/filter/tone_curves.hpp"

#include <algorithm>
#include <cmath>

namespace facebench::filter {

namespace {

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

} // namespace

std::array<double, 3> eval_tone_curve(const ToneCurve& curve, double r, double g, double b) {
    std::array<double, 3> c{clamp01(r) * curve.gain_r, clamp01(g) * curve.gain_g,
                            clamp01(b) * curve.gain_b};
    for (double& v : c) {
        v = std::pow(clamp01(v), curve.gamma);
        v = curve.lift + (1.0 - curve.lift) * v;
        v = 0.5 + curve.contrast * (v - 0.5);
    }
    const double luma = 0.299 * c[0] + 0.587 * c[1] + 0.114 * c[2];
    for (double& v : c) {
        v = luma + curve.saturation * (v - luma);
        v = clamp01(v);
    }
    return c;
}

const std::map<std::string, ToneCurve>& enhancement_curves() {
    // gain_r, gain_g, gain_b, gamma, lift, contrast, saturation
    static const std::map<std::string, ToneCurve> curves = {
        // Punchy: strong contrast, boosted saturation, faint cool cast.
        {"clarendon", {1.00, 1.00, 1.02, 1.00, 0.00, 1.45, 1.15}},
        // Soft and hazy: lifted blacks, slightly flattened contrast.
        {"gingham", {1.01, 1.00, 0.98, 1.00, 0.06, 0.95, 0.82}},
        // Warm and vivid.
        {"juno", {1.07, 1.00, 0.95, 0.97, 0.00, 1.12, 1.18}},
        // Bright and airy: strong brightening gamma, desaturated a touch.
        {"lark", {0.99, 1.02, 1.03, 0.88, 0.00, 1.02, 0.90}},
        // Muted warm slate.
        {"ludwig", {1.04, 1.00, 0.97, 1.00, 0.02, 1.08, 0.88}},
        // Cool, heavily desaturated (our take keeps a trace of color).
        {"moon", {0.99, 1.00, 1.02, 1.00, 0.05, 1.06, 0.72}},
        // Vintage wash: big lift, low contrast, warm.
        {"reyes", {1.03, 1.00, 0.96, 0.95, 0.10, 0.92, 0.78}},
        // Golden-hour warmth with gentle brightening.
        {"valencia", {1.06, 1.02, 0.94, 0.93, 0.00, 1.03, 1.08}},
        // Cool near-monochrome with lifted shadows.
        {"willow", {1.00, 0.99, 1.01, 1.00, 0.07, 1.04, 0.70}},
    };
    return curves;
}

std::vector<std::string> enhancement_ids() {
    std::vector<std::string> ids;
    for (const auto& [name, curve] : enhancement_curves()) ids.push_back(name);
    ids.push_back("identity");
    return ids;
}

Lut3d bake_lut(const ToneCurve& curve, int size) {
    Lut3d lut = Lut3d::neutral(size);
    const double step = 1.0 / (size - 1);
    for (int b = 0; b < size; ++b) {
        for (int g = 0; g < size; ++g) {
            for (int r = 0; r < size; ++r) {
                const auto out = eval_tone_curve(curve, r * step, g * step, b * step);
                const std::size_t e = lut.entry(r, g, b);
                lut.data[e + 0] = static_cast<float>(out[0]);
                lut.data[e + 1] = static_cast<float>(out[1]);
                lut.data[e + 2] = static_cast<float>(out[2]);
            }
        }
    }
    return lut;
}

} // namespace facebench::filter
