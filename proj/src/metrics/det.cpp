#include "facebench/metrics/det.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "facebench/core/error.hpp"

namespace facebench::metrics {

ClosedSetAccuracy closed_set_accuracy(const std::vector<bool>& rank1_correct) {
    if (rank1_correct.empty())
        throw ContractViolation("closed_set_accuracy: empty result list");
    std::size_t wrong = 0;
    for (bool ok : rank1_correct)
        if (!ok) ++wrong;
    ClosedSetAccuracy acc;
    acc.fnir = static_cast<double>(wrong) / static_cast<double>(rank1_correct.size());
    acc.gar = 1.0 - acc.fnir;
    return acc;
}

std::vector<double> default_thresholds(const std::vector<double>& scores) {
    std::vector<double> t = scores;
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    t.insert(t.begin(), -std::numeric_limits<double>::infinity());
    t.push_back(std::numeric_limits<double>::infinity());
    return t;
}

namespace {

bool passes(double score, double threshold, Polarity polarity) {
    return polarity == Polarity::HigherIsBetter ? score >= threshold : score <= threshold;
}

} // namespace

DETCurve open_set_sweep(const ScoreSet& scores, const std::vector<double>& thresholds) {
    if (scores.mated.empty() || scores.nonmated.empty())
        throw ContractViolation("open_set_sweep: mated and nonmated sets must be non-empty");
    if (!std::is_sorted(thresholds.begin(), thresholds.end()))
        throw ContractViolation("open_set_sweep: thresholds must be sorted ascending");

    DETCurve curve;
    curve.axes = CurveAxes::FpirFnir;
    curve.polarity = scores.polarity;
    curve.points.reserve(thresholds.size());
    const double nm = static_cast<double>(scores.nonmated.size());
    const double m = static_cast<double>(scores.mated.size());
    for (double t : thresholds) {
        std::size_t fp = 0;
        for (double s : scores.nonmated)
            if (passes(s, t, scores.polarity)) ++fp;
        std::size_t fn = 0;
        for (const MatedScore& ms : scores.mated)
            if (!ms.rank1_correct || !passes(ms.score, t, scores.polarity)) ++fn;
        curve.points.push_back({t, static_cast<double>(fp) / nm, static_cast<double>(fn) / m});
    }
    return curve;
}

DETCurve verification_sweep(const std::vector<double>& genuine,
                            const std::vector<double>& impostor,
                            const std::vector<double>& thresholds) {
    if (genuine.empty() || impostor.empty())
        throw ContractViolation("verification_sweep: genuine and impostor sets must be non-empty");
    if (!std::is_sorted(thresholds.begin(), thresholds.end()))
        throw ContractViolation("verification_sweep: thresholds must be sorted ascending");

    DETCurve curve;
    curve.axes = CurveAxes::FarFrr;
    curve.polarity = Polarity::LowerIsBetter;
    curve.points.reserve(thresholds.size());
    const double ni = static_cast<double>(impostor.size());
    const double ng = static_cast<double>(genuine.size());
    for (double t : thresholds) {
        std::size_t fa = 0;
        for (double s : impostor)
            if (s <= t) ++fa;
        std::size_t fr = 0;
        for (double s : genuine)
            if (s > t) ++fr;
        curve.points.push_back({t, static_cast<double>(fa) / ni, static_cast<double>(fr) / ng});
    }
    return curve;
}

EERResult compute_eer(const DETCurve& curve) {
    if (curve.points.size() < 2)
        throw ContractViolation("compute_eer: curve must have at least 2 points");

    // Exact crossing at a grid point wins outright.
    for (const DetPoint& p : curve.points) {
        if (p.error_x == p.error_y)
            return {p.error_x, p.threshold, false};
    }
    for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
        const DetPoint& p = curve.points[i];
        const DetPoint& q = curve.points[i + 1];
        const double d0 = p.error_x - p.error_y;
        const double d1 = q.error_x - q.error_y;
        if ((d0 < 0.0 && d1 > 0.0) || (d0 > 0.0 && d1 < 0.0)) {
            const double s = d0 / (d0 - d1);
            EERResult r;
            r.eer = p.error_x + s * (q.error_x - p.error_x);
            if (std::isfinite(p.threshold) && std::isfinite(q.threshold))
                r.threshold = p.threshold + s * (q.threshold - p.threshold);
            else
                r.threshold = std::isfinite(p.threshold) ? p.threshold : q.threshold;
            return r;
        }
    }
    // No sign change anywhere: report the closest point and flag it.
    EERResult r;
    r.no_crossing = true;
    double best_gap = std::numeric_limits<double>::infinity();
    for (const DetPoint& p : curve.points) {
        const double gap = std::abs(p.error_x - p.error_y);
        if (gap < best_gap) {
            best_gap = gap;
            r.eer = std::max(p.error_x, p.error_y);
            r.threshold = p.threshold;
        }
    }
    return r;
}

std::string axes_label_x(CurveAxes axes) {
    return axes == CurveAxes::FpirFnir ? "fpir" : "far";
}

std::string axes_label_y(CurveAxes axes) {
    return axes == CurveAxes::FpirFnir ? "fnir" : "frr";
}

} // namespace facebench::metrics
