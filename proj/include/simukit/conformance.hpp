#pragma once

// Deterministic re-implementation of the Unit Test Reviewer's eight checks
// over a netlist plus knowledge base.

#include <string>
#include <vector>

#include "simukit/kb.hpp"
#include "simukit/netlist.hpp"

namespace simukit::conformance {

enum class Severity { Error, Warning };

struct Finding {
    int check_id = 0;  // 1..8
    Severity severity = Severity::Error;
    std::string message;
    std::string location;  // block name or "connection N"

    bool operator==(const Finding&) const = default;
};

struct ValidationReport {
    std::vector<Finding> findings;
    bool pass = true;  // true iff no finding has severity error

    std::size_t error_count() const;
};

using netlist::Netlist;
using kb::KnowledgeBase;

// 1. Identify the existence of the block list.
std::vector<Finding> check1_block_list_presence(const Netlist& n);
// 2. Identify any extra blocks (declared but never used as an endpoint).
std::vector<Finding> check2_extra_blocks(const Netlist& n);
// 3. Formatting of block name (no '/').
std::vector<Finding> check3_name_format(const Netlist& n);
// 4. Formatting of connection description (KB types, no nested-name forms,
//    annotations only on blocks with port-count parameters).
std::vector<Finding> check4_connection_format(const Netlist& n, const KnowledgeBase& kb);
// 5. Validate parameter settings in connections against exposure rules.
std::vector<Finding> check5_param_settings(const Netlist& n, const KnowledgeBase& kb);
// 6. Detect duplicate connections into the same dedicated input port.
std::vector<Finding> check6_duplicate_inputs(const Netlist& n, const KnowledgeBase& kb);
// 7. Validate block connection types (role-legal sources and destinations).
std::vector<Finding> check7_connection_roles(const Netlist& n, const KnowledgeBase& kb);
// 8. Verify complete port connections under the netlist's parameter settings.
std::vector<Finding> check8_port_completeness(const Netlist& n, const KnowledgeBase& kb);

// Checks 1-8 in order; pass = no errors.
ValidationReport validate(const Netlist& n, const KnowledgeBase& kb);

// Fixed-template prose report mirroring the eight numbered headings.
std::string render_report_text(const ValidationReport& report);

}  // namespace simukit::conformance
