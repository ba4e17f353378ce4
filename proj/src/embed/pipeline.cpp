#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "facebench/core/error.hpp"
#include "facebench/embed/pipeline.hpp"

namespace facebench::embed {

namespace {

constexpr int kCropSize = 64;
constexpr int kDim = 128;

double luma(const Image& img, int x, int y) {
    return 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) + 0.114 * img.at(x, y, 2);
}

// 4x4 cell RGB means (48) + 8x8 cell luminance means (64) + 4x4 cell
// luminance standard deviation (16) = 128 dimensions.
std::vector<double> grid128_features(const Image& crop) {
    std::vector<double> out;
    out.reserve(kDim);
    const int coarse = kCropSize / 4;
    for (int cy = 0; cy < 4; ++cy)
        for (int cx = 0; cx < 4; ++cx) {
            double sum[3] = {0, 0, 0};
            for (int y = cy * coarse; y < (cy + 1) * coarse; ++y)
                for (int x = cx * coarse; x < (cx + 1) * coarse; ++x)
                    for (int c = 0; c < 3; ++c) sum[c] += crop.at(x, y, c);
            const double n = coarse * coarse;
            out.push_back(sum[0] / n);
            out.push_back(sum[1] / n);
            out.push_back(sum[2] / n);
        }
    const int fine = kCropSize / 8;
    for (int cy = 0; cy < 8; ++cy)
        for (int cx = 0; cx < 8; ++cx) {
            double sum = 0;
            for (int y = cy * fine; y < (cy + 1) * fine; ++y)
                for (int x = cx * fine; x < (cx + 1) * fine; ++x) sum += luma(crop, x, y);
            out.push_back(sum / (fine * fine));
        }
    for (int cy = 0; cy < 4; ++cy)
        for (int cx = 0; cx < 4; ++cx) {
            double sum = 0, sum2 = 0;
            for (int y = cy * coarse; y < (cy + 1) * coarse; ++y)
                for (int x = cx * coarse; x < (cx + 1) * coarse; ++x) {
                    const double v = luma(crop, x, y);
                    sum += v;
                    sum2 += v * v;
                }
            const double n = coarse * coarse;
            const double mean = sum / n;
            out.push_back(std::sqrt(std::max(0.0, sum2 / n - mean * mean)));
        }
    return out;
}

const std::vector<std::string>& adapter_ids() {
    static const std::vector<std::string> ids = {"resnet34", "resnet50", "vgg16"};
    return ids;
}

} // namespace

std::vector<std::string> backbone_ids() {
    std::vector<std::string> ids = {"grid128"};
    for (const std::string& id : adapter_ids()) ids.push_back(id);
    return ids;
}

BackboneInfo backbone_info(const std::string& backbone_id, const std::string& model_root) {
    if (backbone_id == "grid128") return {"grid128", "1", kDim, kCropSize};
    for (const std::string& id : adapter_ids()) {
        if (id != backbone_id) continue;
        const std::string path = model_root + "/" + backbone_id + ".weights";
        if (!std::filesystem::exists(path))
            throw ConfigError("Backbone '" + backbone_id + "' requires model weights at " +
                              path + ", which does not exist");
        throw ConfigError("Backbone '" + backbone_id +
                          "' has weights present but no loader registered in this build");
    }
    std::string valid;
    for (const std::string& id : backbone_ids()) valid += (valid.empty() ? "" : ", ") + id;
    throw RegistryError("Unknown backbone '" + backbone_id + "'; valid ids: " + valid);
}

EmbeddingRecord extract_embedding(const Image& img, const Rect& box,
                                  const std::string& backbone_id,
                                  const std::string& model_root) {
    const BackboneInfo info = backbone_info(backbone_id, model_root);
    const Image crop = crop_resize(img, box, info.input_size);
    EmbeddingRecord rec;
    rec.vector = grid128_features(crop);
    return rec;
}

std::vector<double> MinMaxScaler::apply(const std::vector<double>& v) const {
    if (v.size() != min.size())
        throw ContractViolation("Vector dimension " + std::to_string(v.size()) +
                                " does not match scaler dimension " + std::to_string(min.size()));
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double range = max[i] - min[i];
        if (range <= 0.0) {
            out[i] = 0.0;
            continue;
        }
        out[i] = std::clamp((v[i] - min[i]) / range, 0.0, 1.0);
    }
    return out;
}

MinMaxScaler fit_minmax(const std::vector<std::vector<double>>& train,
                        const std::string& fitted_on) {
    if (train.empty()) throw ContractViolation("Scaler fit requires a non-empty training matrix");
    const std::size_t dim = train.front().size();
    MinMaxScaler s;
    s.fitted_on = fitted_on;
    s.min.assign(dim, std::numeric_limits<double>::infinity());
    s.max.assign(dim, -std::numeric_limits<double>::infinity());
    for (const std::vector<double>& row : train) {
        if (row.size() != dim)
            throw ContractViolation("Ragged training matrix passed to scaler fit");
        for (std::size_t i = 0; i < dim; ++i) {
            s.min[i] = std::min(s.min[i], row[i]);
            s.max[i] = std::max(s.max[i], row[i]);
        }
    }
    return s;
}

ScaledMatrices fit_apply_minmax(const std::vector<std::vector<double>>& train,
                                const std::vector<std::vector<std::vector<double>>>& others,
                                const std::string& fitted_on) {
    ScaledMatrices out;
    out.scaler = fit_minmax(train, fitted_on);
    out.train.reserve(train.size());
    for (const std::vector<double>& row : train) out.train.push_back(out.scaler.apply(row));
    out.others.reserve(others.size());
    for (const auto& matrix : others) {
        std::vector<std::vector<double>> scaled;
        scaled.reserve(matrix.size());
        for (const std::vector<double>& row : matrix) scaled.push_back(out.scaler.apply(row));
        out.others.push_back(std::move(scaled));
    }
    return out;
}

void save_embeddings(const std::vector<EmbeddingRecord>& records, const std::string& backbone_id,
                     const std::string& scaler_id, const std::string& path) {
    const std::size_t dim = records.empty() ? 0 : records.front().vector.size();
    nlohmann::json header;
    header["backbone"] = backbone_id;
    header["dimension"] = dim;
    header["scaler"] = scaler_id;
    header["rows"] = nlohmann::json::array();
    for (const EmbeddingRecord& r : records) {
        if (r.vector.size() != dim)
            throw ContractViolation("Embedding store rows must share one dimension");
        header["rows"].push_back(
            {{"image_id", r.image_id}, {"identity", r.identity}, {"dataset", r.dataset}});
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("Cannot write embedding store to " + path);
    out << header.dump() << "\n";
    // Column-contiguous payload: all values of dimension 0, then dimension 1...
    for (std::size_t d = 0; d < dim; ++d)
        for (const EmbeddingRecord& r : records) {
            const double v = r.vector[d];
            out.write(reinterpret_cast<const char*>(&v), sizeof v);
        }
    if (!out) throw IoError("Failed writing embedding store to " + path);
}

std::vector<EmbeddingRecord> load_embeddings(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("Cannot read embedding store from " + path);
    std::string header_line;
    if (!std::getline(in, header_line)) throw IoError("Embedding store missing header: " + path);
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(header_line);
    } catch (const nlohmann::json::exception& e) {
        throw IoError("Malformed embedding store header in " + path + ": " + e.what());
    }
    std::vector<EmbeddingRecord> records;
    try {
        const std::size_t dim = header.at("dimension").get<std::size_t>();
        for (const auto& row : header.at("rows")) {
            EmbeddingRecord r;
            r.image_id = row.at("image_id").get<std::string>();
            r.identity = row.at("identity").get<std::string>();
            r.dataset = row.at("dataset").get<std::string>();
            r.vector.assign(dim, 0.0);
            records.push_back(std::move(r));
        }
        for (std::size_t d = 0; d < dim; ++d)
            for (EmbeddingRecord& r : records) {
                double v = 0.0;
                if (!in.read(reinterpret_cast<char*>(&v), sizeof v))
                    throw IoError("Embedding store truncated: " + path);
                r.vector[d] = v;
            }
    } catch (const nlohmann::json::exception& e) {
        throw IoError("Malformed embedding store header in " + path + ": " + e.what());
    }
    return records;
}

void export_embeddings_csv(const std::vector<EmbeddingRecord>& records, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("Cannot write CSV to " + path);
    const std::size_t dim = records.empty() ? 0 : records.front().vector.size();
    out << "image_id,identity,dataset";
    for (std::size_t d = 0; d < dim; ++d) out << ",v" << d;
    out << "\n";
    char buf[64];
    for (const EmbeddingRecord& r : records) {
        out << r.image_id << "," << r.identity << "," << r.dataset;
        for (const double v : r.vector) {
            std::snprintf(buf, sizeof buf, ",%.17g", v);
            out << buf;
        }
        out << "\n";
    }
    if (!out) throw IoError("Failed writing CSV to " + path);
}

} // namespace facebench::embed
