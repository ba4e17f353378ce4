#include <fstream>
#include <sstream>

#include "facebench/core/error.hpp"
#include "facebench/run/config.hpp"

namespace facebench::run {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

} // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> config;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto comment = line.find('#');
        if (comment != std::string::npos) line.erase(comment);
        const std::string trimmed = trim(line);
        if (trimmed.empty()) continue;
        const auto eq = trimmed.find('=');
        if (eq == std::string::npos)
            throw ConfigError("Config line " + std::to_string(line_no) +
                              " is not key=value: '" + trimmed + "'");
        const std::string key = trim(trimmed.substr(0, eq));
        const std::string value = trim(trimmed.substr(eq + 1));
        if (key.empty())
            throw ConfigError("Config line " + std::to_string(line_no) + " has an empty key");
        if (config.count(key))
            throw ConfigError("Duplicate config key '" + key + "' at line " +
                              std::to_string(line_no));
        config[key] = value;
    }
    return config;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("Cannot open config file: " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_text(text.str());
}

std::string config_string(const std::map<std::string, std::string>& config,
                          const std::string& key, const std::string& fallback) {
    const auto it = config.find(key);
    return it == config.end() ? fallback : it->second;
}

long long config_int(const std::map<std::string, std::string>& config, const std::string& key,
                     long long fallback) {
    const auto it = config.find(key);
    if (it == config.end()) return fallback;
    try {
        std::size_t used = 0;
        const long long value = std::stoll(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument("trailing text");
        return value;
    } catch (const std::exception&) {
        throw ConfigError("Config key '" + key + "' is not an integer: '" + it->second + "'");
    }
}

double config_double(const std::map<std::string, std::string>& config, const std::string& key,
                     double fallback) {
    const auto it = config.find(key);
    if (it == config.end()) return fallback;
    try {
        std::size_t used = 0;
        const double value = std::stod(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument("trailing text");
        return value;
    } catch (const std::exception&) {
        throw ConfigError("Config key '" + key + "' is not a number: '" + it->second + "'");
    }
}

std::string canonical_config_string(const std::map<std::string, std::string>& config) {
    std::ostringstream out;
    bool first = true;
    for (const auto& [key, value] : config) {
        if (!first) out << '\n';
        out << key << '=' << value;
        first = false;
    }
    return out.str();
}

} // namespace facebench::run
