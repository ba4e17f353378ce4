#include <fstream>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "facebench/core/error.hpp"
#include "facebench/data/manifest.hpp"

namespace facebench {

bool DatasetManifest::has_image(const std::string& image_id) const {
    for (const ManifestRecord& r : records)
        if (r.image_id == image_id) return true;
    return false;
}

void validate_manifest(const DatasetManifest& m, int min_images) {
    std::set<std::string> seen;
    std::map<std::string, int> per_identity;
    for (const ManifestRecord& r : m.records) {
        if (!seen.insert(r.image_id).second)
            throw ContractViolation("Manifest '" + m.name + "' repeats image id '" +
                                    r.image_id + "'");
        ++per_identity[r.identity];
    }
    if (min_images > 0) {
        for (const auto& [identity, count] : per_identity) {
            if (count < min_images)
                throw ContractViolation("Manifest '" + m.name + "' identity '" + identity +
                                        "' has " + std::to_string(count) + " images; " +
                                        std::to_string(min_images) + " required");
        }
    }
}

void save_manifest(const DatasetManifest& m, const std::string& path) {
    validate_manifest(m);
    nlohmann::json doc;
    doc["name"] = m.name;
    doc["source"] = m.source;
    doc["records"] = nlohmann::json::array();
    for (const ManifestRecord& r : m.records) {
        doc["records"].push_back({{"image_id", r.image_id},
                                  {"identity", r.identity},
                                  {"path", r.path},
                                  {"provenance", r.provenance}});
    }
    doc["excluded"] = nlohmann::json::array();
    for (const ExclusionRecord& e : m.excluded)
        doc["excluded"].push_back({{"image_id", e.image_id}, {"reason", e.reason}});
    std::ofstream out(path);
    if (!out) throw IoError("Cannot write manifest to " + path);
    out << doc.dump(1) << "\n";
    if (!out) throw IoError("Failed writing manifest to " + path);
}

DatasetManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("Cannot read manifest from " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("Malformed manifest " + path + ": " + e.what());
    }
    DatasetManifest m;
    try {
        m.name = doc.at("name").get<std::string>();
        m.source = doc.at("source").get<std::string>();
        for (const auto& r : doc.at("records")) {
            m.records.push_back({r.at("image_id").get<std::string>(),
                                 r.at("identity").get<std::string>(),
                                 r.at("path").get<std::string>(),
                                 r.at("provenance").get<std::string>()});
        }
        for (const auto& e : doc.at("excluded"))
            m.excluded.push_back(
                {e.at("image_id").get<std::string>(), e.at("reason").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
        throw IoError("Malformed manifest " + path + ": " + e.what());
    }
    validate_manifest(m);
    return m;
}

} // namespace facebench
