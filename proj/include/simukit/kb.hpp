#pragma once

// Block knowledge base: ingest, index and query Full Block Descriptions,
// including parameter-dependent port exposure.
//
// The document dialect is line-oriented markdown. A record is
//
//   ## <BlockType>
//   **Path:** `'<library path>'`
//   **Ports:**
//   ... port bullets ...
//   ---
//
// Ports explicitly described under an "Input Port:"/"Output Port:" header are
// dedicated; everything else is conserving. Conditional clauses
// ("When `p` is set to V, the exposed ports are: ...") become exposure rules.
// Bold markers and list bullets are decorative and ignored.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "simukit/param.hpp"

namespace simukit::kb {

enum class PortRole { DedicatedInput, DedicatedOutput, Conserving };

std::string to_string(PortRole role);

struct PortSpec {
    std::string name;
    PortRole role = PortRole::Conserving;
    std::string visual_label;  // e.g. "~1"; empty when the record gives none

    bool operator==(const PortSpec&) const = default;
};

// Maps one parameter to the set of port names it exposes.
struct ExposureRule {
    enum class Kind {
        ValueMap,   // enumerated values, each with an explicit port list
        SignCount,  // value is a sign string; exposes input ports 1..len(value)
    };

    std::string parameter;
    Kind kind = Kind::ValueMap;
    // ValueMap: declaration-ordered (value, exposed port names).
    std::vector<std::pair<std::string, std::vector<std::string>>> values;
    // SignCount: longest admissible sign string.
    int max_signs = 0;

    bool operator==(const ExposureRule&) const = default;
};

struct BlockDescriptor {
    std::string block_type;
    std::string library_path;
    std::vector<PortSpec> ports;  // declaration order
    std::vector<ExposureRule> exposure_rules;
    bool multi_input_exempt = false;

    bool operator==(const BlockDescriptor&) const = default;

    bool has_port_count_params() const { return !exposure_rules.empty(); }
};

// Which side of a connection an endpoint sits on; numeric signal ports share a
// name between an input and an output slot, so resolution is side-sensitive.
enum class PortSide { Source, Destination, Either };

// Resolve a port name against a descriptor. Source prefers dedicated-output,
// destination prefers dedicated-input; conserving wins over the wrong-role
// dedicated port either way. Returns nullptr when the name does not exist.
const PortSpec* resolve_port(const BlockDescriptor& desc, std::string_view name,
                             PortSide side);

// Ports that only exist through some exposure rule (in declaration order).
std::vector<const PortSpec*> governed_ports(const BlockDescriptor& desc);

// Ports presented under the given parameter settings: fixed ports plus
// rule-enabled ones, in declaration order. Parameters not named by any rule
// are ignored; a value outside a rule's domain throws UnknownParameterValue.
std::vector<PortSpec> exposed_ports(const BlockDescriptor& desc,
                                    const ParamSettings& params);

class KnowledgeBase {
public:
    // Parses a whole KB document. Throws MalformedRecord (missing path or
    // ports section) and DuplicateBlockType.
    static KnowledgeBase ingest(const std::string& text);

    // Exact keyed lookup on the normalized type (case-insensitive,
    // whitespace-collapsed). Throws UnknownBlockType with nearest-key
    // suggestions; no fuzzy matching is performed.
    const BlockDescriptor& lookup(std::string_view block_type) const;

    const BlockDescriptor* find(std::string_view block_type) const noexcept;
    const BlockDescriptor* find_by_path(std::string_view library_path) const noexcept;

    // Raw source slice of a record, for prompt/report payloads.
    const std::string& record_text(std::string_view block_type) const;

    // Canonical type spellings in ingest order.
    std::vector<std::string> block_types() const;

    std::size_t size() const { return order_.size(); }
    bool empty() const { return order_.empty(); }

private:
    std::vector<std::string> order_;  // normalized keys, ingest order
    std::map<std::string, BlockDescriptor> by_type_;
    std::map<std::string, std::string> raw_records_;
    std::map<std::string, std::string> path_to_type_;  // exact path -> key
};

KnowledgeBase ingest(const std::string& text);
KnowledgeBase ingest_file(const std::string& path);

// Canonical rendering of the descriptor set back into the document dialect.
// ingest(render_kb(ingest(doc))) equals ingest(doc) on descriptors.
std::string render_record(const BlockDescriptor& desc);
std::string render_kb(const KnowledgeBase& kb);

}  // namespace simukit::kb
