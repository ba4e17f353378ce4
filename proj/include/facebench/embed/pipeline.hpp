#ifndef FACEBENCH_EMBED_PIPELINE_HPP
#define FACEBENCH_EMBED_PIPELINE_HPP

#include <string>
#include <vector>

#include "facebench/imaging/geometry.hpp"
#include "facebench/imaging/image.hpp"

namespace facebench::embed {

// One embedded image: a fixed-dimension feature vector plus the labels the
// experiment layer needs to route it.
struct EmbeddingRecord {
    std::vector<double> vector;
    std::string identity;
    std::string dataset;
    std::string image_id;
};

// Feature extractor behind a registry id. The bundled "grid128" backbone
// computes deterministic 128-dimensional grid statistics (cell color means,
// finer luminance means, and cell luminance spread) over a 64x64 crop of the
// detection box. Ids for external pretrained networks are adapter slots: they
// resolve only when their weight file is present under the model root.
struct BackboneInfo {
    std::string id;
    std::string version;
    int dimension = 0;
    int input_size = 0;
};

// Throws RegistryError for ids outside the registry; throws ConfigError naming
// <model_root>/<id>.weights for known adapter ids whose weights are absent.
BackboneInfo backbone_info(const std::string& backbone_id,
                           const std::string& model_root = "models");

std::vector<std::string> backbone_ids();

// Crop to the detection box, resize to the backbone input, and compute the
// feature vector. Deterministic for a fixed backbone.
EmbeddingRecord extract_embedding(const Image& img, const Rect& box,
                                  const std::string& backbone_id,
                                  const std::string& model_root = "models");

// Per-dimension affine rescaling fitted on training data only.
struct MinMaxScaler {
    std::vector<double> min;
    std::vector<double> max;
    std::string fitted_on;

    // (x - min) / (max - min), clamped into [0,1]; degenerate dimensions
    // (max == min) map to 0.
    std::vector<double> apply(const std::vector<double>& v) const;
};

MinMaxScaler fit_minmax(const std::vector<std::vector<double>>& train,
                        const std::string& fitted_on = "");

// Fits on train, applies to train and every other matrix in place of the
// originals (returned copies). Throws ContractViolation on empty train or on
// dimension mismatches.
struct ScaledMatrices {
    std::vector<std::vector<double>> train;
    std::vector<std::vector<std::vector<double>>> others;
    MinMaxScaler scaler;
};

ScaledMatrices fit_apply_minmax(const std::vector<std::vector<double>>& train,
                                const std::vector<std::vector<std::vector<double>>>& others,
                                const std::string& fitted_on = "");

// Columnar embedding store: single file per (dataset, backbone) with a JSON
// header {backbone id, dimension, scaler id, row labels} followed by the
// feature matrix stored column-contiguous as little-endian float64.
void save_embeddings(const std::vector<EmbeddingRecord>& records, const std::string& backbone_id,
                     const std::string& scaler_id, const std::string& path);
std::vector<EmbeddingRecord> load_embeddings(const std::string& path);

// Human-readable export: one row per record, full float precision.
void export_embeddings_csv(const std::vector<EmbeddingRecord>& records, const std::string& path);

} // namespace facebench::embed

#endif
