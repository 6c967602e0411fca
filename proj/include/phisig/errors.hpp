#pragma once

#include <stdexcept>
#include <string>

namespace phisig {

// Error taxonomy shared by every module.  Callers (and the CLI exit-code
// mapping) distinguish three situations:
//   * std::domain_error    -- the input violates a documented precondition
//   * resource_error       -- the input is legal but exceeds a configured
//                             ceiling (sieve capacity, enumeration caps, ...)
//   * internal_error       -- an invariant that must hold by construction was
//                             observed broken; always a bug, never user error
// Arithmetic overflow of a checked product/sum throws std::overflow_error and
// is treated like a resource ceiling by the CLI.

class resource_error : public std::runtime_error {
public:
    explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

class internal_error : public std::logic_error {
public:
    explicit internal_error(const std::string& what) : std::logic_error(what) {}
};

} // namespace phisig
