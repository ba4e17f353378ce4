#ifndef FACEBENCH_RUN_REPORT_HPP
#define FACEBENCH_RUN_REPORT_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "facebench/run/corpus.hpp"
#include "facebench/run/experiment.hpp"
#include "facebench/run/tsne.hpp"

namespace facebench::run {

// Key/value provenance stamped at the top of every result file as '# key=value'
// lines: component versions, seeds, and the configuration hash, so any CSV can
// be traced back to the exact run that produced it.
using ProvenanceHeader = std::vector<std::pair<std::string, std::string>>;

// FNV-1a of the canonical configuration string, as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& text);

// All writers use fixed formats so that two runs with the same inputs produce
// byte-identical files.
void write_detection_rates(const std::string& path, const ProvenanceHeader& header,
                           const std::vector<std::string>& variants,
                           const std::vector<DetectionSummary>& summaries);

void write_closed_set(const std::string& path, const ProvenanceHeader& header,
                      const std::vector<ClosedSetRow>& rows);

void write_cross_filter(const std::string& path, const ProvenanceHeader& header,
                        const CrossFilterMatrix& matrix);

void write_open_set(const std::string& path, const ProvenanceHeader& header,
                    const std::vector<OpenSetResult>& results);

void write_verification(const std::string& path, const ProvenanceHeader& header,
                        const std::vector<VerificationRow>& rows);

void write_tsne(const std::string& path, const ProvenanceHeader& header,
                const std::vector<TsnePoint>& points);

} // namespace facebench::run

#endif
