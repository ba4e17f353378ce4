#ifndef FACEBENCH_FILTER_DATASET_HPP
#define FACEBENCH_FILTER_DATASET_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "facebench/data/manifest.hpp"
#include "facebench/filter/engine.hpp"

namespace facebench::filter {

// How each image of a variant gets its filter: one fixed id for every image,
// or one of the nine enhancement looks drawn per image from a seeded stream.
struct FilterChoice {
    bool random = false;
    std::string filter_id; // meaningful when !random

    static FilterChoice fixed(std::string id);
    static FilterChoice random_enhancement();
};

// The per-image filter assignment for a manifest, drawn up-front in record
// order so the result is independent of any later processing order.
std::vector<std::string> assign_filters(const DatasetManifest& source,
                                        const FilterChoice& choice, std::uint64_t seed);

// Applies the chosen filter to every source record, writing each output image
// as PNG under out_dir and returning the new variant manifest. Identities are
// preserved; provenance records the filter applied. Images whose landmarks an
// AR filter cannot find, and images that fail to read or write, are excluded
// with a reason instead of aborting the build.
DatasetManifest build_filtered_dataset(const DatasetManifest& source, const FilterEngine& engine,
                                       const FilterChoice& choice, std::uint64_t seed,
                                       const std::string& out_dir,
                                       const std::string& variant_name);

} // namespace facebench::filter

#endif
