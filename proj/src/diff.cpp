#include "simukit/diff.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "simukit/error.hpp"
#include "simukit/text.hpp"

namespace simukit::diff {

using kb::PortRole;
using kb::PortSide;

namespace {

std::string canonical_type(const kb::KnowledgeBase& kb, const std::string& raw) {
    if (const auto* desc = kb.find(raw)) return normalize_key(desc->block_type);
    return normalize_key(raw);
}

template <typename T>
std::size_t multiset_intersection(std::vector<T> a, std::vector<T> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t count = 0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) {
            ++i;
        } else if (b[j] < a[i]) {
            ++j;
        } else {
            ++count;
            ++i;
            ++j;
        }
    }
    return count;
}

}  // namespace

CanonicalKeys canonicalize(const netlist::Netlist& n, const kb::KnowledgeBase& kb) {
    CanonicalKeys out;
    for (const auto& b : n.blocks) {
        out.blocks.push_back(canonical_type(kb, b.block_type));
    }

    auto role_of = [&](const netlist::Endpoint& e, PortSide side)
        -> std::optional<PortRole> {
        const auto* inst = n.find_block(e.block_name);
        if (!inst) return std::nullopt;
        const auto* desc = kb.find(inst->block_type);
        if (!desc) return std::nullopt;  // unknown types degrade to directed keys
        const auto* port = kb::resolve_port(*desc, e.port, side);
        if (!port) return std::nullopt;
        return port->role;
    };
    auto type_of = [&](const netlist::Endpoint& e) {
        const auto* inst = n.find_block(e.block_name);
        return canonical_type(kb, inst ? inst->block_type : e.block_name);
    };

    for (const auto& c : n.connections) {
        ConnectionKey key;
        key.a_type = type_of(c.src);
        key.a_port = c.src.port;
        key.b_type = type_of(c.dst);
        key.b_port = c.dst.port;

        auto src_role = role_of(c.src, PortSide::Source);
        auto dst_role = role_of(c.dst, PortSide::Destination);
        bool both_conserving = src_role && dst_role &&
                               *src_role == PortRole::Conserving &&
                               *dst_role == PortRole::Conserving;
        key.directed = !both_conserving;
        if (!key.directed) {
            // Unordered pair: key(a->b) == key(b->a).
            if (std::tie(key.b_type, key.b_port) < std::tie(key.a_type, key.a_port)) {
                std::swap(key.a_type, key.b_type);
                std::swap(key.a_port, key.b_port);
            }
        }
        out.connections.push_back(std::move(key));
    }

    std::sort(out.blocks.begin(), out.blocks.end());
    std::sort(out.connections.begin(), out.connections.end());
    return out;
}

DiffResult accuracy(const netlist::Netlist& gt, const netlist::Netlist& gen,
                    const kb::KnowledgeBase& kb) {
    if (gt.blocks.empty() || gt.connections.empty()) {
        throw Error("EmptyGroundTruth",
                    "ground truth must contain at least one block and one connection");
    }
    auto gt_keys = canonicalize(gt, kb);
    auto gen_keys = canonicalize(gen, kb);

    DiffResult r;
    r.b_gt = gt_keys.blocks.size();
    r.c_gt = gt_keys.connections.size();
    r.b_match = multiset_intersection(gt_keys.blocks, gen_keys.blocks);
    r.c_match = multiset_intersection(gt_keys.connections, gen_keys.connections);
    r.accuracy = 0.5 * (static_cast<double>(r.b_match) / static_cast<double>(r.b_gt) +
                        static_cast<double>(r.c_match) / static_cast<double>(r.c_gt));
    return r;
}

std::string format_percent(double percent) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", percent);
    return buf;
}

}  // namespace simukit::diff
