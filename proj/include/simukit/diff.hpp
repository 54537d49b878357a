#pragma once

// Reproduction-accuracy metric between a generated netlist and ground truth:
// the average of block accuracy and connection accuracy over canonical keys.

#include <string>
#include <vector>

#include "simukit/kb.hpp"
#include "simukit/netlist.hpp"

namespace simukit::diff {

// Canonical connection key. Blocks match by type (display names are dropped);
// a conserving-conserving connection is direction-insensitive, everything
// else keeps its src->dst orientation.
struct ConnectionKey {
    bool directed = true;
    std::string a_type;
    std::string a_port;
    std::string b_type;
    std::string b_port;

    auto operator<=>(const ConnectionKey&) const = default;
};

struct CanonicalKeys {
    std::vector<std::string> blocks;         // sorted multiset of type keys
    std::vector<ConnectionKey> connections;  // sorted multiset
};

CanonicalKeys canonicalize(const netlist::Netlist& n, const kb::KnowledgeBase& kb);

struct DiffResult {
    std::size_t b_match = 0;
    std::size_t b_gt = 0;
    std::size_t c_match = 0;
    std::size_t c_gt = 0;
    double accuracy = 0.0;  // 0.5 * (b_match/b_gt + c_match/c_gt)

    double percent() const { return accuracy * 100.0; }
};

// Matches are multiset intersections of canonical keys.
// Throws EmptyGroundTruth when the GT has no blocks or no connections.
DiffResult accuracy(const netlist::Netlist& gt, const netlist::Netlist& gen,
                    const kb::KnowledgeBase& kb);

// Table-style display value, rounded to 2 decimals in percent.
std::string format_percent(double percent);

}  // namespace simukit::diff
