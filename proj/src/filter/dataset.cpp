#include <exception>
#include <filesystem>

#include "facebench/core/error.hpp"
#include "facebench/core/rng.hpp"
#include "facebench/filter/dataset.hpp"
#include "facebench/filter/tone_curves.hpp"

namespace facebench::filter {

FilterChoice FilterChoice::fixed(std::string id) {
    FilterChoice c;
    c.random = false;
    c.filter_id = std::move(id);
    return c;
}

FilterChoice FilterChoice::random_enhancement() {
    FilterChoice c;
    c.random = true;
    return c;
}

std::vector<std::string> assign_filters(const DatasetManifest& source,
                                        const FilterChoice& choice, std::uint64_t seed) {
    std::vector<std::string> assigned;
    assigned.reserve(source.records.size());
    if (!choice.random) {
        filter_spec(choice.filter_id); // validate the id up front
        assigned.assign(source.records.size(), choice.filter_id);
        return assigned;
    }
    std::vector<std::string> pool;
    for (const std::string& id : enhancement_ids())
        if (id != "identity") pool.push_back(id);
    Rng rng(seed);
    for (std::size_t i = 0; i < source.records.size(); ++i)
        assigned.push_back(pool[rng.index(pool.size())]);
    return assigned;
}

DatasetManifest build_filtered_dataset(const DatasetManifest& source, const FilterEngine& engine,
                                       const FilterChoice& choice, std::uint64_t seed,
                                       const std::string& out_dir,
                                       const std::string& variant_name) {
    const std::vector<std::string> assigned = assign_filters(source, choice, seed);
    std::filesystem::create_directories(out_dir);

    DatasetManifest out;
    out.name = variant_name;
    out.source = source.source;
    for (std::size_t i = 0; i < source.records.size(); ++i) {
        const ManifestRecord& rec = source.records[i];
        const std::string& filter_id = assigned[i];
        const FilterSpec spec = filter_spec(filter_id);
        try {
            const Image img = load_image(rec.path);
            Image result;
            if (spec.kind == FilterSpec::Kind::Enhancement) {
                result = engine.apply_enhancement(img, filter_id);
            } else {
                std::optional<Image> filtered = engine.apply_ar_filter(img, filter_id);
                if (!filtered) {
                    out.excluded.push_back({rec.image_id, "landmarks_absent"});
                    continue;
                }
                result = std::move(*filtered);
            }
            const std::string path =
                (std::filesystem::path(out_dir) / (rec.image_id + ".png")).string();
            save_png(result, path);
            out.records.push_back({rec.image_id, rec.identity, path, "filter:" + filter_id});
        } catch (const DecodeError& e) {
            out.excluded.push_back({rec.image_id, std::string("io:") + e.what()});
        } catch (const IoError& e) {
            out.excluded.push_back({rec.image_id, std::string("io:") + e.what()});
        }
    }
    // Pass through source-side exclusions so per-variant accounting always
    // covers the full corpus.
    for (const ExclusionRecord& e : source.excluded) out.excluded.push_back(e);
    return out;
}

} // namespace facebench::filter
