#include "simukit/codegen.hpp"

#include <cctype>
#include <map>
#include <sstream>

#include "simukit/conformance.hpp"
#include "simukit/error.hpp"
#include "simukit/text.hpp"

namespace simukit::codegen {

namespace {

std::string quote_matlab(std::string_view s) {
    std::string out;
    out.reserve(s.size() + 2);
    out.push_back('\'');
    for (char c : s) {
        if (c == '\'') out.push_back('\'');
        out.push_back(c);
    }
    out.push_back('\'');
    return out;
}

std::string quote_py(std::string_view s) {
    std::string out;
    out.reserve(s.size() + 2);
    out.push_back('\'');
    for (char c : s) {
        if (c == '\'' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('\'');
    return out;
}

// "<model>/<name>" -> "<name>" when the path is under this script's model.
std::string_view strip_model(std::string_view path, const std::string& model) {
    if (starts_with(path, model + "/")) return path.substr(model.size() + 1);
    return path;
}

}  // namespace

std::string sanitize_model_name(std::string_view stem) {
    std::string out;
    for (char c : stem) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            out.push_back(c);
        } else if (!out.empty() && out.back() != '_') {
            out.push_back('_');
        }
    }
    while (!out.empty() && out.back() == '_') out.pop_back();
    if (out.empty()) out = "model";
    if (std::isdigit(static_cast<unsigned char>(out.front()))) out = "m_" + out;
    return out;
}

BuildScript lower(const netlist::Netlist& n, const kb::KnowledgeBase& kb,
                  const std::string& model_name, const LowerOptions& options) {
    if (options.require_valid) {
        auto report = conformance::validate(n, kb);
        if (!report.pass) {
            std::string first;
            for (const auto& f : report.findings) {
                if (f.severity == conformance::Severity::Error) {
                    first = f.message;
                    break;
                }
            }
            throw Error("UnvalidatedNetlist",
                        "netlist has " + std::to_string(report.error_count()) +
                            " validation error(s); first: " + first);
        }
    }

    BuildScript script;
    script.model_name = model_name;
    script.commands.emplace_back(NewSystem{model_name});
    script.commands.emplace_back(OpenSystem{model_name});

    for (const auto& b : n.blocks) {
        const auto& desc = kb.lookup(b.block_type);
        script.commands.emplace_back(
            AddBlock{desc.library_path, model_name + "/" + b.name, true});

        // Port-count parameters only, keyed by the descriptor's rules, value
        // from the first annotation in the netlist. Emitted before any line
        // touches the ports the parameter governs.
        auto merged = n.params_for(b.name);
        for (const auto& rule : desc.exposure_rules) {
            for (const auto& p : merged) {
                if (p.key == rule.parameter) {
                    script.commands.emplace_back(
                        SetParam{model_name + "/" + b.name, p.key, p.value});
                    break;
                }
            }
        }
    }

    for (const auto& c : n.connections) {
        script.commands.emplace_back(AddLine{model_name,
                                             c.src.block_name + "/" + c.src.port,
                                             c.dst.block_name + "/" + c.dst.port});
    }

    script.commands.emplace_back(ArrangeSystem{model_name});
    script.commands.emplace_back(SaveSystem{model_name, model_name + ".slx"});
    return script;
}

std::string render_matlab(const BuildScript& script, const RenderOptions& options) {
    std::ostringstream out;
    const auto& model = script.model_name;
    out << "model = " << quote_matlab(model) << ";\n";
    for (const auto& cmd : script.commands) {
        if (std::holds_alternative<NewSystem>(cmd)) {
            out << "new_system(model, 'Model');\n";
        } else if (std::holds_alternative<OpenSystem>(cmd)) {
            out << "open_system(model);\n";
        } else if (const auto* add = std::get_if<AddBlock>(&cmd)) {
            out << "add_block(" << quote_matlab(add->library_path) << ", [model "
                << quote_matlab("/" + std::string(strip_model(add->dest_path, model)))
                << "]";
            if (add->make_name_unique) out << ", 'MakeNameUnique', 'on'";
            out << ");\n";
        } else if (const auto* set = std::get_if<SetParam>(&cmd)) {
            out << "set_param([model "
                << quote_matlab("/" + std::string(strip_model(set->block_path, model)))
                << "], " << quote_matlab(set->key) << ", " << quote_matlab(set->value)
                << ");\n";
        } else if (const auto* line = std::get_if<AddLine>(&cmd)) {
            out << "add_line(model, " << quote_matlab(line->src) << ", "
                << quote_matlab(line->dst);
            if (options.autorouting) out << ", 'autorouting', 'on'";
            out << ");\n";
        } else if (std::holds_alternative<ArrangeSystem>(cmd)) {
            out << "Simulink.BlockDiagram.arrangeSystem(model);\n";
        } else if (const auto* save = std::get_if<SaveSystem>(&cmd)) {
            out << "save_system(model, [model '.slx']);\n";
            (void)save;
        }
    }
    return out.str();
}

std::string render_engine_script(const BuildScript& script, const RenderOptions& options) {
    std::ostringstream out;
    const auto& model = script.model_name;
    out << "import matlab.engine\n";
    out << "# engine path setup is installation-specific; extend sys.path here if "
           "needed\n\n";
    out << "eng = matlab.engine.start_matlab()\n\n";
    out << "model_name = " << quote_py(model) << "\n";

    bool in_add_block = false;
    bool in_add_line = false;
    for (const auto& cmd : script.commands) {
        bool is_block = std::holds_alternative<AddBlock>(cmd) ||
                        std::holds_alternative<SetParam>(cmd);
        bool is_line = std::holds_alternative<AddLine>(cmd);
        if (is_block && !in_add_block) out << "\n";
        if (is_line && !in_add_line) out << "\n";
        in_add_block = is_block;
        in_add_line = is_line;

        if (std::holds_alternative<NewSystem>(cmd)) {
            out << "eng.new_system(model_name, nargout=0)\n";
        } else if (std::holds_alternative<OpenSystem>(cmd)) {
            out << "eng.open_system(model_name, nargout=0)\n";
        } else if (const auto* add = std::get_if<AddBlock>(&cmd)) {
            out << "eng.add_block(" << quote_py(add->library_path) << ", model_name + "
                << quote_py("/" + std::string(strip_model(add->dest_path, model)));
            if (add->make_name_unique) out << ", 'MakeNameUnique', 'on'";
            out << ", nargout=0)\n";
        } else if (const auto* set = std::get_if<SetParam>(&cmd)) {
            out << "eng.set_param(model_name + "
                << quote_py("/" + std::string(strip_model(set->block_path, model))) << ", "
                << quote_py(set->key) << ", " << quote_py(set->value) << ", nargout=0)\n";
        } else if (const auto* line = std::get_if<AddLine>(&cmd)) {
            out << "eng.add_line(model_name, " << quote_py(line->src) << ", "
                << quote_py(line->dst);
            if (options.autorouting) out << ", 'autorouting', 'on'";
            out << ", nargout=0)\n";
        } else if (std::holds_alternative<ArrangeSystem>(cmd)) {
            out << "\neng.Simulink.BlockDiagram.arrangeSystem(model_name, nargout=0)\n";
        } else if (std::holds_alternative<SaveSystem>(cmd)) {
            out << "\neng.save_system(model_name, model_name + '.slx', nargout=0)\n";
        }
    }
    return out.str();
}

}  // namespace simukit::codegen
