#pragma once

#include <string>
#include <vector>

namespace simukit {

// One `key` = `value` annotation as written in a connection description.
struct ParamSetting {
    std::string key;
    std::string value;

    bool operator==(const ParamSetting&) const = default;
};

using ParamSettings = std::vector<ParamSetting>;

}  // namespace simukit
