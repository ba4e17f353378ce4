#ifndef FACEBENCH_FILTER_LANDMARKS_HPP
#define FACEBENCH_FILTER_LANDMARKS_HPP

#include <vector>

#include "facebench/imaging/geometry.hpp"

namespace facebench::filter {

// Named landmark groups following the 68-point convention. "left" means image
// left (the subject's right side). Coordinates are image pixels. As in the
// standard grouping, the two lip groups share their four mouth-corner points,
// so the 72 listed entries cover 68 distinct landmarks.
struct LandmarkSet {
    std::vector<Point> chin;          // 17 points along the jaw line
    std::vector<Point> left_eyebrow;  // 5
    std::vector<Point> right_eyebrow; // 5
    std::vector<Point> nose_bridge;   // 4, top to tip
    std::vector<Point> nose_tip;      // 5, across the nostril line
    std::vector<Point> left_eye;      // 6, around the eye opening
    std::vector<Point> right_eye;     // 6
    std::vector<Point> top_lip;       // 12
    std::vector<Point> bottom_lip;    // 12

    // Minimal shape requirements for placement: both eyes with enough points
    // to form a stable centroid, and at least one nose-tip point.
    bool valid() const {
        return left_eye.size() >= 4 && right_eye.size() >= 4 && !nose_tip.empty();
    }

    std::size_t total_points() const {
        return chin.size() + left_eyebrow.size() + right_eyebrow.size() + nose_bridge.size() +
               nose_tip.size() + left_eye.size() + right_eye.size() + top_lip.size() +
               bottom_lip.size();
    }
};

Point centroid(const std::vector<Point>& points);

// Eye centers used for overlay alignment: centroids of the eye-outline groups.
Point left_eye_center(const LandmarkSet& lm);
Point right_eye_center(const LandmarkSet& lm);
double inter_eye_distance(const LandmarkSet& lm);

// Clamp every point into [0, w-1] x [0, h-1].
void clamp_to_bounds(LandmarkSet& lm, int width, int height);

} // namespace facebench::filter

#endif
