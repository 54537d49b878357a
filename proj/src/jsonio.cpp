#include "simukit/jsonio.hpp"

#include <fstream>

#include "simukit/error.hpp"

namespace simukit::jsonio {

using nlohmann::json;

json to_json(const conformance::ValidationReport& report) {
    json findings = json::array();
    for (const auto& f : report.findings) {
        findings.push_back({
            {"check", f.check_id},
            {"severity", f.severity == conformance::Severity::Error ? "error" : "warning"},
            {"message", f.message},
            {"location", f.location},
        });
    }
    return json{{"findings", findings}, {"pass", report.pass}};
}

json to_json(const diff::DiffResult& result) {
    return json{
        {"b_match", result.b_match},
        {"b_gt", result.b_gt},
        {"c_match", result.c_match},
        {"c_gt", result.c_gt},
        {"accuracy_percent",
         std::stod(diff::format_percent(result.percent()))},
    };
}

json to_json(const codegen::BuildScript& script) {
    json commands = json::array();
    for (const auto& cmd : script.commands) {
        if (const auto* c = std::get_if<codegen::NewSystem>(&cmd)) {
            commands.push_back({{"op", "new_system"}, {"model", c->model}});
        } else if (const auto* c = std::get_if<codegen::OpenSystem>(&cmd)) {
            commands.push_back({{"op", "open_system"}, {"model", c->model}});
        } else if (const auto* c = std::get_if<codegen::AddBlock>(&cmd)) {
            commands.push_back({{"op", "add_block"},
                                {"library_path", c->library_path},
                                {"dest_path", c->dest_path},
                                {"make_name_unique", c->make_name_unique}});
        } else if (const auto* c = std::get_if<codegen::AddLine>(&cmd)) {
            commands.push_back({{"op", "add_line"},
                                {"model", c->model},
                                {"src", c->src},
                                {"dst", c->dst}});
        } else if (const auto* c = std::get_if<codegen::SetParam>(&cmd)) {
            commands.push_back({{"op", "set_param"},
                                {"block_path", c->block_path},
                                {"key", c->key},
                                {"value", c->value}});
        } else if (const auto* c = std::get_if<codegen::ArrangeSystem>(&cmd)) {
            commands.push_back({{"op", "arrange_system"}, {"model", c->model}});
        } else if (const auto* c = std::get_if<codegen::SaveSystem>(&cmd)) {
            commands.push_back(
                {{"op", "save_system"}, {"model", c->model}, {"file", c->file}});
        }
    }
    return json{{"model_name", script.model_name}, {"commands", commands}};
}

codegen::BuildScript script_from_json(const json& j) {
    codegen::BuildScript script;
    script.model_name = j.at("model_name").get<std::string>();
    for (const auto& c : j.at("commands")) {
        auto op = c.at("op").get<std::string>();
        if (op == "new_system") {
            script.commands.emplace_back(codegen::NewSystem{c.at("model")});
        } else if (op == "open_system") {
            script.commands.emplace_back(codegen::OpenSystem{c.at("model")});
        } else if (op == "add_block") {
            script.commands.emplace_back(codegen::AddBlock{
                c.at("library_path"), c.at("dest_path"),
                c.value("make_name_unique", true)});
        } else if (op == "add_line") {
            script.commands.emplace_back(
                codegen::AddLine{c.at("model"), c.at("src"), c.at("dst")});
        } else if (op == "set_param") {
            script.commands.emplace_back(
                codegen::SetParam{c.at("block_path"), c.at("key"), c.at("value")});
        } else if (op == "arrange_system") {
            script.commands.emplace_back(codegen::ArrangeSystem{c.at("model")});
        } else if (op == "save_system") {
            script.commands.emplace_back(
                codegen::SaveSystem{c.at("model"), c.at("file")});
        } else {
            throw Error("UnknownCommand", "script op '" + op + "'");
        }
    }
    return script;
}

codegen::BuildScript script_from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("UnknownCommand", "cannot open script '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw Error("UnknownCommand", "bad script JSON in '" + path + "': " + e.what());
    }
    return script_from_json(j);
}

json to_json(const executor::ExecutionResult& result) {
    json j;
    j["status"] = result.ok() ? "ok" : "failed";
    if (result.failed_command_index) {
        j["failed_command_index"] = *result.failed_command_index;
    }
    j["error_message"] = result.error_message;
    j["wall_time_s"] = result.wall_time_s;
    j["port_occupancy"] = result.port_occupancy;
    return j;
}

json to_json(const orchestrator::Transcript& transcript) {
    json messages = json::array();
    for (const auto& m : transcript.messages) {
        json j;
        j["role"] = orchestrator::to_string(m.role);
        j["direction"] =
            m.direction == orchestrator::Direction::Request ? "request" : "response";
        j["content"] = m.content;
        if (m.image_ref) j["image_ref"] = *m.image_ref;
        j["timestamp"] = m.timestamp;
        if (m.token_cost) j["token_cost"] = *m.token_cost;
        messages.push_back(j);
    }
    return json{{"metadata", transcript.metadata}, {"messages", messages}};
}

json to_json(const orchestrator::RunRecord& record) {
    json j;
    j["final_state"] = orchestrator::to_string(record.final_state);
    j["netlist"] = netlist::render(record.net);
    j["validation"] = to_json(record.validation);
    j["script"] = to_json(record.script);
    json executions = json::array();
    for (const auto& e : record.executions) executions.push_back(to_json(e));
    j["executions"] = executions;
    j["report"] = record.report_doc;
    j["cost_usd"] = record.cost_usd;
    j["wall_time_s"] = record.wall_time_s;
    j["transcript"] = to_json(record.transcript);
    j["failure_reason"] = record.failure_reason;
    return j;
}

}  // namespace simukit::jsonio
