#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "facebench/core/error.hpp"
#include "facebench/run/report.hpp"

namespace facebench::run {

namespace {

std::ofstream open_report(const std::string& path, const ProvenanceHeader& header) {
    std::ofstream out(path);
    if (!out) throw IoError("Cannot open report file for writing: " + path);
    for (const auto& [key, value] : header) out << "# " << key << "=" << value << "\n";
    return out;
}

std::string fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    return buf;
}

// Thresholds and raw scores use shortest-round-trip precision; rates use a
// fixed six-decimal format.
std::string full(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void close_report(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw IoError("Failed writing report file: " + path);
}

} // namespace

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t hash = 1469598103934665603ULL;
    for (unsigned char c : text) {
        hash ^= static_cast<std::uint64_t>(c);
        hash *= 1099511628211ULL;
    }
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, hash);
    return buf;
}

void write_detection_rates(const std::string& path, const ProvenanceHeader& header,
                           const std::vector<std::string>& variants,
                           const std::vector<DetectionSummary>& summaries) {
    if (variants.size() != summaries.size())
        throw ContractViolation("write_detection_rates: variant/summary count mismatch");
    std::ofstream out = open_report(path, header);
    out << "variant,total,accepted,rejected_none,rejected_multiple,rate,reference_rate\n";
    for (std::size_t i = 0; i < variants.size(); ++i) {
        const DetectionSummary& s = summaries[i];
        out << variants[i] << "," << s.total << "," << s.accepted << "," << s.rejected_none << ","
            << s.rejected_multiple << "," << fixed(s.rate(), 6) << ","
            << fixed(s.reference_rate, 6) << "\n";
    }
    close_report(out, path);
}

void write_closed_set(const std::string& path, const ProvenanceHeader& header,
                      const std::vector<ClosedSetRow>& rows) {
    std::ofstream out = open_report(path, header);
    out << "variant,method,probes,gar,fnir\n";
    for (const ClosedSetRow& row : rows)
        out << row.variant << "," << row.method << "," << row.probes << ","
            << fixed(row.accuracy.gar, 6) << "," << fixed(row.accuracy.fnir, 6) << "\n";
    close_report(out, path);
}

void write_cross_filter(const std::string& path, const ProvenanceHeader& header,
                        const CrossFilterMatrix& matrix) {
    std::ofstream out = open_report(path, header);
    out << "classifier,train_variant";
    for (const std::string& v : matrix.variants) out << ",test_" << v;
    out << "\n";
    if (matrix.gar.size() != matrix.variants.size())
        throw ContractViolation("write_cross_filter: row count does not match variant count");
    for (std::size_t i = 0; i < matrix.gar.size(); ++i) {
        if (matrix.gar[i].size() != matrix.variants.size())
            throw ContractViolation("write_cross_filter: column count does not match variants");
        out << matrix.classifier << "," << matrix.variants[i];
        for (double gar : matrix.gar[i]) out << "," << fixed(gar, 6);
        out << "\n";
    }
    close_report(out, path);
}

void write_open_set(const std::string& path, const ProvenanceHeader& header,
                    const std::vector<OpenSetResult>& results) {
    std::ofstream out = open_report(path, header);
    out << "variant,gallery_identities,heldout_identities,threshold,fpir,fnir\n";
    for (const OpenSetResult& r : results)
        for (const metrics::DetPoint& pt : r.curve.points)
            out << r.variant << "," << r.gallery_identities << "," << r.heldout_identities << ","
                << full(pt.threshold) << "," << fixed(pt.error_x, 6) << ","
                << fixed(pt.error_y, 6) << "\n";
    close_report(out, path);
}

void write_verification(const std::string& path, const ProvenanceHeader& header,
                        const std::vector<VerificationRow>& rows) {
    std::ofstream out = open_report(path, header);
    out << "variant,metric,genuine,impostor,eer,threshold,no_crossing\n";
    for (const VerificationRow& row : rows)
        out << row.variant << "," << row.metric << "," << row.genuine << "," << row.impostor
            << "," << fixed(row.eer.eer, 6) << "," << full(row.eer.threshold) << ","
            << (row.eer.no_crossing ? 1 : 0) << "\n";
    close_report(out, path);
}

void write_tsne(const std::string& path, const ProvenanceHeader& header,
                const std::vector<TsnePoint>& points) {
    std::ofstream out = open_report(path, header);
    out << "image_id,identity,dataset,x,y\n";
    for (const TsnePoint& pt : points)
        out << pt.image_id << "," << pt.identity << "," << pt.dataset << "," << fixed(pt.x, 6)
            << "," << fixed(pt.y, 6) << "\n";
    close_report(out, path);
}

} // namespace facebench::run
