#pragma once

#include <stdexcept>
#include <string>

namespace cohsp {

// Base class for all library errors.
struct error : std::runtime_error {
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// A token, clique or point was handed to a space it does not belong to,
// or an argument falls outside an operation's domain.
struct domain_error : error {
    explicit domain_error(const std::string& what) : error(what) {}
};

// A stated precondition does not hold (reported, not silently extrapolated).
struct precondition_error : error {
    explicit precondition_error(const std::string& what) : error(what) {}
};

// An enumeration budget or exhaustive-mode cap was exceeded.
struct resource_error : error {
    explicit resource_error(const std::string& what) : error(what) {}
};

// The requested operation is not available in this mode (e.g. symbolic).
struct unsupported_error : error {
    explicit unsupported_error(const std::string& what) : error(what) {}
};

// Malformed input text; carries a 1-based line number when known.
struct parse_error : error {
    int line = 0;
    parse_error(int line_, const std::string& what)
        : error("line " + std::to_string(line_) + ": " + what), line(line_) {}
    explicit parse_error(const std::string& what) : error(what) {}
};

// Inconsistent external data (e.g. a misbehaving oracle).
struct data_error : error {
    explicit data_error(const std::string& what) : error(what) {}
};

}  // namespace cohsp
