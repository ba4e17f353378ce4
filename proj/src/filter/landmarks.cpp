#include <algorithm>
#include <cmath>

#include "facebench/core/error.hpp"
#include "facebench/filter/landmarks.hpp"

namespace facebench::filter {

Point centroid(const std::vector<Point>& points) {
    if (points.empty()) throw ContractViolation("centroid of an empty point group");
    Point c;
    for (const Point& p : points) {
        c.x += p.x;
        c.y += p.y;
    }
    c.x /= points.size();
    c.y /= points.size();
    return c;
}

Point left_eye_center(const LandmarkSet& lm) { return centroid(lm.left_eye); }
Point right_eye_center(const LandmarkSet& lm) { return centroid(lm.right_eye); }

double inter_eye_distance(const LandmarkSet& lm) {
    const Point l = left_eye_center(lm);
    const Point r = right_eye_center(lm);
    return std::hypot(r.x - l.x, r.y - l.y);
}

void clamp_to_bounds(LandmarkSet& lm, int width, int height) {
    auto clamp_group = [&](std::vector<Point>& group) {
        for (Point& p : group) {
            p.x = std::min(static_cast<double>(width - 1), std::max(0.0, p.x));
            p.y = std::min(static_cast<double>(height - 1), std::max(0.0, p.y));
        }
    };
    clamp_group(lm.chin);
    clamp_group(lm.left_eyebrow);
    clamp_group(lm.right_eyebrow);
    clamp_group(lm.nose_bridge);
    clamp_group(lm.nose_tip);
    clamp_group(lm.left_eye);
    clamp_group(lm.right_eye);
    clamp_group(lm.top_lip);
    clamp_group(lm.bottom_lip);
}

} // namespace facebench::filter
