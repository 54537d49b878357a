#pragma once

// The Investigator's connection-description DSL.
//
// Block list: one `Name (Type)` per non-empty line, the type being the longest
// trailing parenthesized group (types may themselves contain parentheses).
// Connections: `LHS <-> RHS` where each side is
// `Name (Type) Port [(`key` = `value`, ...)]`; the left side is the source.

#include <string>
#include <string_view>
#include <vector>

#include "simukit/param.hpp"

namespace simukit::netlist {

struct BlockInstance {
    std::string name;        // display name, no '/'
    std::string block_type;

    bool operator==(const BlockInstance&) const = default;
};

struct Endpoint {
    std::string block_name;
    std::string port;
    ParamSettings params;

    bool operator==(const Endpoint&) const = default;
};

struct Connection {
    Endpoint src;  // left of '<->'
    Endpoint dst;

    bool operator==(const Connection&) const = default;
};

struct Netlist {
    std::vector<BlockInstance> blocks;
    std::vector<Connection> connections;

    bool operator==(const Netlist&) const = default;

    // Case-insensitive, whitespace-collapsed display-name resolution.
    const BlockInstance* find_block(std::string_view name) const;

    // Every parameter annotation attached to any endpoint of this block,
    // in netlist order.
    ParamSettings params_for(std::string_view block_name) const;
};

// Throws BadBlockLine (with line number), SlashInName, DuplicateBlockName.
std::vector<BlockInstance> parse_block_list(std::string_view text);

// Throws BadConnectionLine, UnknownBlockName, TypeMismatch.
std::vector<Connection> parse_connections(std::string_view text,
                                          const std::vector<BlockInstance>& blocks);

// Whole netlist file: block-list section, blank line, connection section.
Netlist parse_netlist(std::string_view text);
Netlist parse_netlist_file(const std::string& path);

// Exact DSL emission; parse_netlist(render(n)) structurally equals n.
std::string render(const Netlist& n);
std::string render_endpoint(const Endpoint& e, const std::vector<BlockInstance>& blocks);

}  // namespace simukit::netlist
