#ifndef FACEBENCH_CORE_ERROR_HPP
#define FACEBENCH_CORE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace facebench {

// Caller broke a documented precondition.
class ContractViolation : public std::logic_error {
public:
    explicit ContractViolation(const std::string& msg) : std::logic_error(msg) {}
};

// Missing or inconsistent configuration (model paths, adapter ids, config files).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed image stream.
class DecodeError : public std::runtime_error {
public:
    explicit DecodeError(const std::string& msg) : std::runtime_error(msg) {}
};

// Unknown id looked up in a registry; message lists the valid ids.
class RegistryError : public std::runtime_error {
public:
    explicit RegistryError(const std::string& msg) : std::runtime_error(msg) {}
};

// Training aborted; message carries step index and offending value.
class TrainError : public std::runtime_error {
public:
    explicit TrainError(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Overlay asset cannot be placed (degenerate landmark geometry).
class PlacementError : public std::runtime_error {
public:
    explicit PlacementError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace facebench

#endif
