#ifndef FACEBENCH_FILTER_TONE_CURVES_HPP
#define FACEBENCH_FILTER_TONE_CURVES_HPP

#include <array>
#include <map>
#include <string>
#include <vector>

#include "facebench/filter/lut.hpp"

namespace facebench::filter {

// Analytic definition of one enhancement filter: a global per-pixel color
// mapping composed of white-balance gains, a gamma curve, a black lift, a
// linear contrast stretch about mid-gray, and a saturation scale toward
// Rec.601 luma — applied in that order, then clamped. Every curve is bakeable
// into a 3D lookup table.
//
// Saturation factors stay at or above 0.7 and white-balance gains stay within
// a few percent of neutral so that strongly colored features (skin warmth,
// red lips) keep their hue signatures under every filter.
struct ToneCurve {
    double gain_r = 1.0;
    double gain_g = 1.0;
    double gain_b = 1.0;
    double gamma = 1.0;      // out = in^gamma, per channel (gamma < 1 brightens)
    double lift = 0.0;       // out = lift + (1 - lift) * in
    double contrast = 1.0;   // out = 0.5 + contrast * (in - 0.5)
    double saturation = 1.0; // out = luma + saturation * (in - luma)
};

std::array<double, 3> eval_tone_curve(const ToneCurve& curve, double r, double g, double b);

// The nine bundled looks, keyed by id. Names follow common filter-culture
// vocabulary; the transfer functions are our own approximations.
const std::map<std::string, ToneCurve>& enhancement_curves();

// Ids in registry order: the nine looks plus "identity".
std::vector<std::string> enhancement_ids();

// Evaluate the curve at every lattice point of a neutral LUT.
Lut3d bake_lut(const ToneCurve& curve, int size = 33);

} // namespace facebench::filter

#endif
