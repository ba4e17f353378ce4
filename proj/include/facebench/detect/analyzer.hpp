#ifndef FACEBENCH_DETECT_ANALYZER_HPP
#define FACEBENCH_DETECT_ANALYZER_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "facebench/filter/landmarks.hpp"
#include "facebench/imaging/geometry.hpp"
#include "facebench/imaging/image.hpp"

namespace facebench::detect {

// One face hypothesis produced by pixel analysis: a warm-colored connected
// region scored by three weighted evidence terms (overall skin brightness,
// red mouth cluster, eye-region darkness structure).
struct FaceCandidate {
    Rect box;                  // detection box (component bounds, padded)
    double score = 0.0;        // in [0,1]; accepted when >= the fixed threshold
    double skin_term = 0.0;
    double mouth_term = 0.0;
    double eye_term = 0.0;
    Point centroid;            // component centroid
    Point left_eye;            // estimated anchors (fallback geometry when the
    Point right_eye;           // corresponding evidence is missing)
    Point mouth_center;
    bool has_eyes = false;
    bool has_mouth = false;
};

// Outcome of the exactly-one-face policy: either a box, or a rejection reason
// "none" / "multiple(n)".
struct SingleFaceResult {
    std::optional<Rect> box;
    std::string rejection;

    bool accepted() const { return box.has_value(); }
};

// Face analysis backend. The bundled analyzer is a deterministic pixel-rule
// pipeline; other ids are slots for external pretrained models and raise a
// configuration error when their weight files are absent.
class FaceAnalyzer {
public:
    virtual ~FaceAnalyzer() = default;
    virtual std::string id() const = 0;
    virtual std::string version() const = 0;
    virtual std::vector<FaceCandidate> detect(const Image& img) const = 0;
    virtual std::optional<filter::LandmarkSet> landmarks(const Image& img) const = 0;
};

// "bundled" returns the built-in analyzer. Any other id requires a weight
// file at <model_root>/<id>.weights; a missing file throws ConfigError naming
// that path.
std::shared_ptr<const FaceAnalyzer> make_analyzer(const std::string& adapter_id,
                                                  const std::string& model_root = "models");

// Convenience entry points over the bundled analyzer.
std::vector<FaceCandidate> detect_faces(const Image& img);
SingleFaceResult detect_single_face(const Image& img);
std::optional<filter::LandmarkSet> detect_landmarks(const Image& img);

} // namespace facebench::detect

#endif
