#pragma once

#include <stdexcept>
#include <string>

namespace simukit {

// Domain error with a stable machine-checkable kind tag. Kinds are the error
// names of the module contracts, e.g. "DuplicateBlockType", "UnknownBlockName",
// "UnvalidatedNetlist", "DirectiveMalformed".
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error("[" + kind + "] " + message), kind_(std::move(kind)) {}

    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

}  // namespace simukit
