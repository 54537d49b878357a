#pragma once

// Lower a validated netlist into the build-command IR restricted to the
// permitted model-construction functions, and render it to script text.

#include <string>
#include <variant>
#include <vector>

#include "simukit/kb.hpp"
#include "simukit/netlist.hpp"

namespace simukit::codegen {

struct NewSystem {
    std::string model;
    bool operator==(const NewSystem&) const = default;
};
struct OpenSystem {
    std::string model;
    bool operator==(const OpenSystem&) const = default;
};
struct AddBlock {
    std::string library_path;
    std::string dest_path;  // "<model>/<block name>"
    bool make_name_unique = true;
    bool operator==(const AddBlock&) const = default;
};
struct AddLine {
    std::string model;
    std::string src;  // "Block/Port"
    std::string dst;
    bool operator==(const AddLine&) const = default;
};
struct SetParam {
    std::string block_path;  // "<model>/<block name>"
    std::string key;         // port-count parameters only
    std::string value;
    bool operator==(const SetParam&) const = default;
};
struct ArrangeSystem {
    std::string model;
    bool operator==(const ArrangeSystem&) const = default;
};
struct SaveSystem {
    std::string model;
    std::string file;
    bool operator==(const SaveSystem&) const = default;
};

// The build vocabulary is exactly these seven commands.
using BuildCommand = std::variant<NewSystem, OpenSystem, AddBlock, AddLine, SetParam,
                                  ArrangeSystem, SaveSystem>;

struct BuildScript {
    std::string model_name;
    std::vector<BuildCommand> commands;

    bool operator==(const BuildScript&) const = default;
};

struct LowerOptions {
    // The contract requires a netlist that passed validation; dry-run probing
    // deliberately lowers unchecked scripts.
    bool require_valid = true;
};

// One AddBlock per block in declaration order (MakeNameUnique on), one
// SetParam per port-count parameter directly after the owning AddBlock, one
// AddLine per connection in declaration order. Throws UnvalidatedNetlist and
// UnknownBlockType.
BuildScript lower(const netlist::Netlist& n, const kb::KnowledgeBase& kb,
                  const std::string& model_name, const LowerOptions& options = {});

struct RenderOptions {
    bool autorouting = false;
};

// Native MATLAB .m script, one call per command, single-quoted literals.
std::string render_matlab(const BuildScript& script, const RenderOptions& options = {});

// matlab.engine binding dialect: engine start, eng.-prefixed calls,
// nargout=0 on statement calls. Byte-stable for a given script.
std::string render_engine_script(const BuildScript& script,
                                 const RenderOptions& options = {});

// Default model naming: sanitized form of a netlist file stem.
std::string sanitize_model_name(std::string_view stem);

}  // namespace simukit::codegen
