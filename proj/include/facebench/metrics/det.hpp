#ifndef FACEBENCH_METRICS_DET_HPP
#define FACEBENCH_METRICS_DET_HPP

#include <string>
#include <vector>

namespace facebench::metrics {

// Score orientation. Distances are lower-is-better, classifier confidences
// higher-is-better; declared explicitly, never inferred.
enum class Polarity { HigherIsBetter, LowerIsBetter };

struct MatedScore {
    double score = 0.0;
    bool rank1_correct = false;
};

// Identification score collections: one top score per mated search plus one
// top score per non-mated search.
struct ScoreSet {
    std::vector<MatedScore> mated;
    std::vector<double> nonmated; // top gallery score of each non-mated search
    Polarity polarity = Polarity::HigherIsBetter;
};

enum class CurveAxes { FpirFnir, FarFrr };

struct DetPoint {
    double threshold = 0.0;
    double error_x = 0.0; // FPIR or FAR
    double error_y = 0.0; // FNIR or FRR
};

struct DETCurve {
    std::vector<DetPoint> points; // thresholds ascending
    CurveAxes axes = CurveAxes::FarFrr;
    Polarity polarity = Polarity::LowerIsBetter;
};

struct ClosedSetAccuracy {
    double fnir = 0.0;
    double gar = 0.0;
};

struct EERResult {
    double eer = 0.0;
    double threshold = 0.0;
    bool no_crossing = false;
};

// FNIR = fraction of searches whose mate is not at rank 1; GAR = 1 - FNIR.
ClosedSetAccuracy closed_set_accuracy(const std::vector<bool>& rank1_correct);

// Default threshold grid: all distinct observed scores plus -inf/+inf
// sentinels, ascending. Exact curves, no binning.
std::vector<double> default_thresholds(const std::vector<double>& scores);

// Per threshold t: FPIR(t) = fraction of nonmated whose top score passes t,
// FNIR(t) = fraction of mated that are not rank-1-correct or whose score
// fails t. "Passes" is >= t for higher-is-better, <= t for lower-is-better.
DETCurve open_set_sweep(const ScoreSet& scores, const std::vector<double>& thresholds);

// Verification with lower-is-better distances: FAR(t) = fraction of impostor
// scores <= t, FRR(t) = fraction of genuine scores > t.
DETCurve verification_sweep(const std::vector<double>& genuine,
                            const std::vector<double>& impostor,
                            const std::vector<double>& thresholds);

// Locates the sign change of (error_x - error_y) along the curve and linearly
// interpolates the common value. When no crossing exists, returns the point
// with minimal |error_x - error_y| and sets no_crossing.
EERResult compute_eer(const DETCurve& curve);

std::string axes_label_x(CurveAxes axes);
std::string axes_label_y(CurveAxes axes);

} // namespace facebench::metrics

#endif
