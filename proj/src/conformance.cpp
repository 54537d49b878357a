#include "simukit/conformance.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "simukit/text.hpp"

namespace simukit::conformance {

using kb::BlockDescriptor;
using kb::PortRole;
using kb::PortSide;
using kb::PortSpec;
using netlist::BlockInstance;
using netlist::Connection;
using netlist::Endpoint;

namespace {

std::string conn_loc(std::size_t index) {
    return "connection " + std::to_string(index + 1);
}

Finding error(int check, std::string message, std::string location) {
    return Finding{check, Severity::Error, std::move(message), std::move(location)};
}

Finding warning(int check, std::string message, std::string location) {
    return Finding{check, Severity::Warning, std::move(message), std::move(location)};
}

const BlockDescriptor* desc_for(const Netlist& n, const KnowledgeBase& kb,
                                std::string_view block_name) {
    const auto* inst = n.find_block(block_name);
    if (!inst) return nullptr;
    return kb.find(inst->block_type);
}

// Exposure for check 8: merged annotations, falling back to the fixed port
// set when a value is bad (check 5 already reported it).
std::vector<PortSpec> safe_exposed(const BlockDescriptor& desc, const ParamSettings& params) {
    try {
        return kb::exposed_ports(desc, params);
    } catch (const std::exception&) {
        return kb::exposed_ports(desc, {});
    }
}

}  // namespace

std::size_t ValidationReport::error_count() const {
    return static_cast<std::size_t>(
        std::count_if(findings.begin(), findings.end(),
                      [](const Finding& f) { return f.severity == Severity::Error; }));
}

std::vector<Finding> check1_block_list_presence(const Netlist& n) {
    std::vector<Finding> out;
    if (n.blocks.empty()) {
        out.push_back(error(1, "the block list is empty", ""));
    }
    for (std::size_t i = 0; i < n.connections.size(); ++i) {
        for (const Endpoint* e : {&n.connections[i].src, &n.connections[i].dst}) {
            if (!n.find_block(e->block_name)) {
                out.push_back(error(1,
                                    "'" + e->block_name + "' is not in the block list",
                                    conn_loc(i)));
            }
        }
    }
    return out;
}

std::vector<Finding> check2_extra_blocks(const Netlist& n) {
    std::set<std::string> used;
    for (const auto& c : n.connections) {
        used.insert(normalize_key(c.src.block_name));
        used.insert(normalize_key(c.dst.block_name));
    }
    std::vector<Finding> out;
    for (const auto& b : n.blocks) {
        if (!used.count(normalize_key(b.name))) {
            out.push_back(error(2,
                                "'" + b.name + "' is declared but never appears in a "
                                               "connection",
                                b.name));
        }
    }
    return out;
}

std::vector<Finding> check3_name_format(const Netlist& n) {
    std::vector<Finding> out;
    for (const auto& b : n.blocks) {
        if (b.name.empty()) {
            out.push_back(error(3, "block with empty name", b.name));
        } else if (b.name.find('/') != std::string::npos) {
            out.push_back(error(3, "block name '" + b.name + "' contains '/'", b.name));
        }
    }
    return out;
}

std::vector<Finding> check4_connection_format(const Netlist& n,
                                              const KnowledgeBase& kb) {
    std::vector<Finding> out;
    for (const auto& b : n.blocks) {
        if (!kb.find(b.block_type)) {
            std::string detail;
            try {
                kb.lookup(b.block_type);
            } catch (const std::exception& e) {
                detail = e.what();
            }
            out.push_back(error(4, detail.empty()
                                       ? "'" + b.block_type + "' is not a known block type"
                                       : detail,
                                b.name));
        }
        if (b.name.find('(') != std::string::npos &&
            b.name.find(')') != std::string::npos) {
            out.push_back(error(4,
                                "block name '" + b.name +
                                    "' embeds a parenthesized group; use the bare display "
                                    "name",
                                b.name));
        }
    }
    for (std::size_t i = 0; i < n.connections.size(); ++i) {
        for (const Endpoint* e : {&n.connections[i].src, &n.connections[i].dst}) {
            if (e->params.empty()) continue;
            const auto* desc = desc_for(n, kb, e->block_name);
            if (desc && !desc->has_port_count_params()) {
                out.push_back(warning(4,
                                      "'" + e->block_name + "' has fixed ports; the "
                                      "parameter annotation is unnecessary",
                                      conn_loc(i)));
            }
        }
    }
    return out;
}

std::vector<Finding> check5_param_settings(const Netlist& n, const KnowledgeBase& kb) {
    std::vector<Finding> out;
    for (const auto& b : n.blocks) {
        const auto* desc = kb.find(b.block_type);
        if (!desc || !desc->has_port_count_params()) continue;

        // Endpoint mentions of this block, in netlist order.
        std::vector<std::pair<std::size_t, const Endpoint*>> mentions;
        for (std::size_t i = 0; i < n.connections.size(); ++i) {
            for (const Endpoint* e : {&n.connections[i].src, &n.connections[i].dst}) {
                if (normalize_key(e->block_name) == normalize_key(b.name)) {
                    mentions.emplace_back(i, e);
                }
            }
        }
        if (mentions.empty()) continue;  // check 2 reports unused blocks

        auto merged = n.params_for(b.name);

        // Self-consistency across mentions.
        std::map<std::string, std::string> first_value;
        std::set<std::string> reported;
        for (const auto& p : merged) {
            auto it = first_value.find(p.key);
            if (it == first_value.end()) {
                first_value[p.key] = p.value;
            } else if (it->second != p.value && !reported.count(p.key)) {
                reported.insert(p.key);
                out.push_back(error(5,
                                    "inconsistent settings of `" + p.key + "` for '" +
                                        b.name + "': `" + it->second + "` vs `" + p.value +
                                        "`",
                                    b.name));
            }
        }

        bool missing = false;
        for (const auto& rule : desc->exposure_rules) {
            if (!first_value.count(rule.parameter)) {
                missing = true;
                out.push_back(error(5,
                                    "'" + b.name + "' needs a `" + rule.parameter +
                                        "` annotation to fix its port count",
                                    b.name));
            }
        }
        if (missing) continue;

        std::vector<PortSpec> exposed;
        try {
            exposed = kb::exposed_ports(*desc, merged);
        } catch (const std::exception& e) {
            out.push_back(error(5, e.what(), b.name));
            continue;
        }
        std::set<std::pair<std::string, PortRole>> exposed_keys;
        for (const auto& p : exposed) exposed_keys.insert({p.name, p.role});

        for (const auto& [ci, e] : mentions) {
            PortSide side = (e == &n.connections[ci].src) ? PortSide::Source
                                                          : PortSide::Destination;
            const auto* port = kb::resolve_port(*desc, e->port, side);
            if (!port) continue;  // check 7 reports unresolvable ports
            if (!exposed_keys.count({port->name, port->role})) {
                out.push_back(error(5,
                                    "port " + e->port + " of '" + b.name +
                                        "' is not exposed under the declared settings",
                                    conn_loc(ci)));
            }
        }
    }
    return out;
}

std::vector<Finding> check6_duplicate_inputs(const Netlist& n, const KnowledgeBase& kb) {
    // (block, dedicated input port) -> dst occurrence count.
    std::map<std::pair<std::string, std::string>, int> counts;
    std::map<std::string, std::string> display;
    for (const auto& c : n.connections) {
        const auto* desc = desc_for(n, kb, c.dst.block_name);
        if (!desc || desc->multi_input_exempt) continue;
        const auto* port = kb::resolve_port(*desc, c.dst.port, PortSide::Destination);
        if (!port || port->role != PortRole::DedicatedInput) continue;  // reusable
        auto key = std::make_pair(normalize_key(c.dst.block_name), port->name);
        ++counts[key];
        display[key.first] = c.dst.block_name;
    }
    std::vector<Finding> out;
    for (const auto& [key, count] : counts) {
        if (count < 2) continue;
        out.push_back(error(6,
                            "input port " + key.second + " of '" + display[key.first] +
                                "' is connected " + std::to_string(count) + " times",
                            display[key.first]));
    }
    return out;
}

std::vector<Finding> check7_connection_roles(const Netlist& n, const KnowledgeBase& kb) {
    std::vector<Finding> out;
    for (std::size_t i = 0; i < n.connections.size(); ++i) {
        const auto& c = n.connections[i];

        if (const auto* desc = desc_for(n, kb, c.src.block_name)) {
            const auto* port = kb::resolve_port(*desc, c.src.port, PortSide::Source);
            if (!port) {
                out.push_back(error(7,
                                    "'" + desc->block_type + "' has no port named " +
                                        c.src.port,
                                    conn_loc(i)));
            } else if (port->role == PortRole::DedicatedInput) {
                out.push_back(error(7,
                                    "port " + c.src.port + " of '" + c.src.block_name +
                                        "' is a dedicated input and cannot drive a "
                                        "connection",
                                    conn_loc(i)));
            }
        }

        if (const auto* desc = desc_for(n, kb, c.dst.block_name)) {
            const auto* port = kb::resolve_port(*desc, c.dst.port, PortSide::Destination);
            if (!port) {
                out.push_back(error(7,
                                    "'" + desc->block_type + "' has no port named " +
                                        c.dst.port,
                                    conn_loc(i)));
            } else if (port->role == PortRole::DedicatedOutput) {
                out.push_back(error(7,
                                    "port " + c.dst.port + " of '" + c.dst.block_name +
                                        "' is a dedicated output and cannot receive a "
                                        "connection",
                                    conn_loc(i)));
            }
        }
    }
    return out;
}

std::vector<Finding> check8_port_completeness(const Netlist& n, const KnowledgeBase& kb) {
    std::vector<Finding> out;
    for (const auto& b : n.blocks) {
        const auto* desc = kb.find(b.block_type);
        if (!desc) continue;

        std::set<const PortSpec*> touched_src, touched_dst;
        for (const auto& c : n.connections) {
            if (normalize_key(c.src.block_name) == normalize_key(b.name)) {
                if (const auto* p = kb::resolve_port(*desc, c.src.port, PortSide::Source)) {
                    touched_src.insert(p);
                }
            }
            if (normalize_key(c.dst.block_name) == normalize_key(b.name)) {
                if (const auto* p =
                        kb::resolve_port(*desc, c.dst.port, PortSide::Destination)) {
                    touched_dst.insert(p);
                }
            }
        }

        for (const auto& exposed : safe_exposed(*desc, n.params_for(b.name))) {
            const PortSpec* port = nullptr;
            for (const auto& p : desc->ports) {
                if (p.name == exposed.name && p.role == exposed.role) {
                    port = &p;
                    break;
                }
            }
            bool connected = false;
            switch (port->role) {
                case PortRole::DedicatedInput: connected = touched_dst.count(port); break;
                case PortRole::DedicatedOutput: connected = touched_src.count(port); break;
                case PortRole::Conserving:
                    connected = touched_src.count(port) || touched_dst.count(port);
                    break;
            }
            if (!connected) {
                out.push_back(error(8,
                                    "port " + port->name + " of '" + b.name + "' (" +
                                        desc->block_type + ") is never connected",
                                    b.name));
            }
        }
    }
    return out;
}

ValidationReport validate(const Netlist& n, const KnowledgeBase& kb) {
    ValidationReport report;
    auto append = [&](std::vector<Finding> fs) {
        report.findings.insert(report.findings.end(), fs.begin(), fs.end());
    };
    append(check1_block_list_presence(n));
    append(check2_extra_blocks(n));
    append(check3_name_format(n));
    append(check4_connection_format(n, kb));
    append(check5_param_settings(n, kb));
    append(check6_duplicate_inputs(n, kb));
    append(check7_connection_roles(n, kb));
    append(check8_port_completeness(n, kb));
    report.pass = report.error_count() == 0;
    return report;
}

std::string render_report_text(const ValidationReport& report) {
    static const char* kHeadings[8] = {
        "Block List Existence",       "Extra Blocks",
        "Formatting of Block Name",   "Formatting of Connection Description",
        "Parameter Settings in Connections", "Duplicate Connections",
        "Block Connection Types",     "Complete Port Connections",
    };
    std::ostringstream out;
    out << "Below is the review of the simulation connections:\n";
    for (int check = 1; check <= 8; ++check) {
        out << "\n" << check << ". " << kHeadings[check - 1] << ":\n";
        bool any = false;
        for (const auto& f : report.findings) {
            if (f.check_id != check) continue;
            any = true;
            out << "- " << (f.severity == Severity::Error ? "ERROR" : "WARNING") << ": "
                << f.message;
            if (!f.location.empty()) out << " [" << f.location << "]";
            out << "\n";
        }
        if (!any) out << "- No issues found.\n";
    }
    out << "\nSummary: " << (report.pass ? "no errors were detected."
                                         : "errors were detected; see above.")
        << "\n";
    return out.str();
}

}  // namespace simukit::conformance
