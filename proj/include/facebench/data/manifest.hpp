#ifndef FACEBENCH_DATA_MANIFEST_HPP
#define FACEBENCH_DATA_MANIFEST_HPP

#include <string>
#include <vector>

namespace facebench {

// One image of a dataset variant. provenance records how the image was
// produced (e.g. "source", "filter:dog", "filter:juno", "recon").
struct ManifestRecord {
    std::string image_id;
    std::string identity;
    std::string path;
    std::string provenance;
};

// A source image that a variant build dropped, with the reason (e.g.
// "landmarks_absent", "io:<message>").
struct ExclusionRecord {
    std::string image_id;
    std::string reason;
};

// A dataset variant: named list of image records derived from one source
// corpus. Record ids are unique; excluded images are listed so that every
// source image is accounted for exactly once per variant.
struct DatasetManifest {
    std::string name;
    std::string source;
    std::vector<ManifestRecord> records;
    std::vector<ExclusionRecord> excluded;

    bool has_image(const std::string& image_id) const;
};

// Throws ContractViolation on duplicate record ids, and, when min_images > 0,
// on any identity with fewer than min_images records.
void validate_manifest(const DatasetManifest& m, int min_images = 0);

// JSON single-file round trip. Loading validates id uniqueness.
void save_manifest(const DatasetManifest& m, const std::string& path);
DatasetManifest load_manifest(const std::string& path);

} // namespace facebench

#endif
