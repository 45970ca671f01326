#pragma once

#include <stdexcept>
#include <string>

namespace aeq {

// Malformed input document (JSON syntax, wrong types, bad half-integer).
struct parse_error : std::runtime_error {
    explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

// Structurally valid input that violates a model invariant.
struct validation_error : std::runtime_error {
    explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

// Illegal operation on a register / schedule at execution time.
struct protocol_error : std::runtime_error {
    explicit protocol_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace aeq
