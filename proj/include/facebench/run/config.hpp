#ifndef FACEBENCH_RUN_CONFIG_HPP
#define FACEBENCH_RUN_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>

namespace facebench::run {

// Flat key=value configuration: '#' starts a comment, blank lines are
// ignored, whitespace around keys and values is trimmed. Duplicate keys and
// lines without '=' raise ConfigError; a missing file raises IoError.
std::map<std::string, std::string> parse_config_file(const std::string& path);

std::map<std::string, std::string> parse_config_text(const std::string& text);

// Typed lookups with defaults. Malformed numbers raise ConfigError naming the
// key.
std::string config_string(const std::map<std::string, std::string>& config,
                          const std::string& key, const std::string& fallback);
long long config_int(const std::map<std::string, std::string>& config, const std::string& key,
                     long long fallback);
double config_double(const std::map<std::string, std::string>& config, const std::string& key,
                     double fallback);

// Sorted "key=value" lines joined by '\n': the string whose hash identifies a
// configuration in report provenance headers.
std::string canonical_config_string(const std::map<std::string, std::string>& config);

} // namespace facebench::run

#endif
