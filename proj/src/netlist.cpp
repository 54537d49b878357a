#include "simukit/netlist.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "simukit/error.hpp"
#include "simukit/text.hpp"

namespace simukit::netlist {

namespace {

// Start index of the trailing balanced parenthesized group, or npos.
// "A (Type (x))" -> index of the '(' before "Type".
std::size_t trailing_group(std::string_view s) {
    if (s.empty() || s.back() != ')') return std::string_view::npos;
    int depth = 0;
    for (std::size_t i = s.size(); i-- > 0;) {
        if (s[i] == ')') ++depth;
        if (s[i] == '(') {
            --depth;
            if (depth == 0) return i;
        }
    }
    return std::string_view::npos;
}

// Split on commas that sit outside backtick quotes.
std::vector<std::string> split_outside_backticks(std::string_view s) {
    std::vector<std::string> parts;
    std::string cur;
    bool quoted = false;
    for (char c : s) {
        if (c == '`') quoted = !quoted;
        if (c == ',' && !quoted) {
            parts.push_back(cur);
            cur.clear();
            continue;
        }
        cur.push_back(c);
    }
    parts.push_back(cur);
    return parts;
}

ParamSettings parse_params(std::string_view inside, int line_no,
                           const std::string& line) {
    ParamSettings out;
    for (const auto& part : split_outside_backticks(inside)) {
        auto t = trim(part);
        if (t.empty()) continue;
        // `key` = `value`
        auto k_open = t.find('`');
        auto k_close = t.find('`', k_open + 1);
        if (k_open == std::string::npos || k_close == std::string::npos) {
            throw Error("BadConnectionLine",
                        "line " + std::to_string(line_no) + ": bad parameter group in '" +
                            line + "'");
        }
        auto key = t.substr(k_open + 1, k_close - k_open - 1);
        auto eq = t.find('=', k_close + 1);
        auto v_open = t.find('`', k_close + 1);
        auto v_close = v_open == std::string::npos ? std::string::npos
                                                   : t.find('`', v_open + 1);
        if (eq == std::string::npos || v_open == std::string::npos ||
            v_close == std::string::npos || eq > v_open || key.empty()) {
            throw Error("BadConnectionLine",
                        "line " + std::to_string(line_no) + ": bad parameter group in '" +
                            line + "'");
        }
        auto value = t.substr(v_open + 1, v_close - v_open - 1);
        if (value.empty()) {
            throw Error("BadConnectionLine",
                        "line " + std::to_string(line_no) + ": empty parameter value in '" +
                            line + "'");
        }
        out.push_back(ParamSetting{key, value});
    }
    return out;
}

struct ParsedSide {
    std::string name;
    std::string type;
    std::string port;
    ParamSettings params;
};

ParsedSide parse_side(std::string_view side, int line_no, const std::string& line) {
    auto fail = [&](const std::string& why) -> Error {
        return Error("BadConnectionLine",
                     "line " + std::to_string(line_no) + ": " + why + " in '" + line + "'");
    };

    ParsedSide out;
    std::string rest = trim(side);

    // Optional trailing parameter group; parameters are backtick-quoted,
    // which is what tells them apart from a parenthesized block type.
    if (ends_with(rest, ")")) {
        auto g = trailing_group(rest);
        if (g != std::string_view::npos) {
            auto inside = rest.substr(g + 1, rest.size() - g - 2);
            if (inside.find('`') != std::string::npos) {
                out.params = parse_params(inside, line_no, line);
                rest = trim(rest.substr(0, g));
            }
        }
    }

    auto sp = rest.find_last_of(" \t");
    if (sp == std::string::npos) throw fail("missing port name");
    out.port = trim(rest.substr(sp + 1));
    rest = trim(rest.substr(0, sp));

    auto g = trailing_group(rest);
    if (g == std::string_view::npos || !ends_with(rest, ")")) {
        throw fail("missing '(block type)'");
    }
    out.type = trim(rest.substr(g + 1, rest.size() - g - 2));
    out.name = trim(rest.substr(0, g));
    if (out.name.empty()) throw fail("missing block name");
    if (out.type.empty()) throw fail("empty block type");
    if (out.port.empty()) throw fail("missing port name");
    return out;
}

}  // namespace

const BlockInstance* Netlist::find_block(std::string_view name) const {
    auto key = normalize_key(name);
    for (const auto& b : blocks) {
        if (normalize_key(b.name) == key) return &b;
    }
    return nullptr;
}

ParamSettings Netlist::params_for(std::string_view block_name) const {
    auto key = normalize_key(block_name);
    ParamSettings out;
    for (const auto& c : connections) {
        for (const Endpoint* e : {&c.src, &c.dst}) {
            if (normalize_key(e->block_name) != key) continue;
            out.insert(out.end(), e->params.begin(), e->params.end());
        }
    }
    return out;
}

std::vector<BlockInstance> parse_block_list(std::string_view text) {
    std::vector<BlockInstance> out;
    std::map<std::string, std::string> seen;  // normalized -> display
    int line_no = 0;
    for (const auto& line : split_lines(text)) {
        ++line_no;
        auto t = trim(line);
        if (t.empty()) continue;

        auto g = trailing_group(t);
        if (g == std::string_view::npos || !ends_with(t, ")")) {
            throw Error("BadBlockLine", "line " + std::to_string(line_no) +
                                            ": expected 'Name (Type)', got '" + t + "'");
        }
        BlockInstance inst;
        inst.block_type = trim(t.substr(g + 1, t.size() - g - 2));
        inst.name = trim(t.substr(0, g));
        if (inst.name.empty() || inst.block_type.empty()) {
            throw Error("BadBlockLine", "line " + std::to_string(line_no) +
                                            ": expected 'Name (Type)', got '" + t + "'");
        }
        if (inst.name.find('/') != std::string::npos) {
            throw Error("SlashInName", "line " + std::to_string(line_no) +
                                           ": block name '" + inst.name +
                                           "' contains '/'");
        }
        auto key = normalize_key(inst.name);
        if (seen.count(key)) {
            throw Error("DuplicateBlockName",
                        "line " + std::to_string(line_no) + ": block name '" + inst.name +
                            "' already declared as '" + seen[key] + "'");
        }
        seen[key] = inst.name;
        out.push_back(std::move(inst));
    }
    return out;
}

std::vector<Connection> parse_connections(std::string_view text,
                                          const std::vector<BlockInstance>& blocks) {
    std::map<std::string, const BlockInstance*> index;
    for (const auto& b : blocks) index[normalize_key(b.name)] = &b;

    auto resolve = [&](const ParsedSide& side, int line_no,
                       const std::string& line) -> Endpoint {
        auto it = index.find(normalize_key(side.name));
        if (it == index.end()) {
            throw Error("UnknownBlockName", "line " + std::to_string(line_no) + ": '" +
                                                side.name +
                                                "' is not in the block list ('" + line +
                                                "')");
        }
        const auto& inst = *it->second;
        if (normalize_key(side.type) != normalize_key(inst.block_type)) {
            throw Error("TypeMismatch", "line " + std::to_string(line_no) + ": '" +
                                            side.name + "' is declared as '" +
                                            inst.block_type + "', not '" + side.type +
                                            "'");
        }
        return Endpoint{inst.name, side.port, side.params};
    };

    std::vector<Connection> out;
    int line_no = 0;
    for (const auto& line : split_lines(text)) {
        ++line_no;
        auto t = trim(line);
        if (t.empty()) continue;

        auto arrow = t.find("<->");
        if (arrow == std::string::npos) {
            throw Error("BadConnectionLine", "line " + std::to_string(line_no) +
                                                 ": missing '<->' in '" + t + "'");
        }
        auto lhs = parse_side(t.substr(0, arrow), line_no, t);
        auto rhs = parse_side(t.substr(arrow + 3), line_no, t);
        out.push_back(Connection{resolve(lhs, line_no, t), resolve(rhs, line_no, t)});
    }
    return out;
}

Netlist parse_netlist(std::string_view text) {
    auto lines = split_lines(text);
    std::size_t i = 0;
    while (i < lines.size() && trim(lines[i]).empty()) ++i;

    std::string block_section;
    for (; i < lines.size() && !trim(lines[i]).empty(); ++i) {
        block_section += lines[i];
        block_section += '\n';
    }
    std::string conn_section;
    for (; i < lines.size(); ++i) {
        conn_section += lines[i];
        conn_section += '\n';
    }

    Netlist n;
    n.blocks = parse_block_list(block_section);
    n.connections = parse_connections(conn_section, n.blocks);
    return n;
}

Netlist parse_netlist_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("BadBlockLine", "cannot open netlist '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_netlist(buf.str());
}

std::string render_endpoint(const Endpoint& e, const std::vector<BlockInstance>& blocks) {
    std::string type;
    auto key = normalize_key(e.block_name);
    for (const auto& b : blocks) {
        if (normalize_key(b.name) == key) {
            type = b.block_type;
            break;
        }
    }
    std::string out = e.block_name + " (" + type + ") " + e.port;
    if (!e.params.empty()) {
        out += " (";
        for (std::size_t i = 0; i < e.params.size(); ++i) {
            if (i) out += ", ";
            out += "`" + e.params[i].key + "` = `" + e.params[i].value + "`";
        }
        out += ")";
    }
    return out;
}

std::string render(const Netlist& n) {
    std::string out;
    for (const auto& b : n.blocks) {
        out += b.name + " (" + b.block_type + ")\n";
    }
    if (!n.connections.empty()) {
        out += "\n";
        for (const auto& c : n.connections) {
            out += render_endpoint(c.src, n.blocks) + " <-> " +
                   render_endpoint(c.dst, n.blocks) + "\n";
        }
    }
    return out;
}

}  // namespace simukit::netlist
