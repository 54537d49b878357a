#include "simukit/transcript.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "simukit/error.hpp"
#include "simukit/text.hpp"

namespace simukit::orchestrator {

using nlohmann::json;

std::string to_string(AgentRole role) {
    switch (role) {
        case AgentRole::Investigator: return "Investigator";
        case AgentRole::UnitTestReviewer: return "UnitTestReviewer";
        case AgentRole::BlockBuilder: return "BlockBuilder";
        case AgentRole::Executor: return "Executor";
        case AgentRole::DebugLocator: return "DebugLocator";
        case AgentRole::ReportWriter: return "ReportWriter";
    }
    return "?";
}

AgentRole agent_role_from_string(const std::string& s) {
    for (auto role : {AgentRole::Investigator, AgentRole::UnitTestReviewer,
                      AgentRole::BlockBuilder, AgentRole::Executor,
                      AgentRole::DebugLocator, AgentRole::ReportWriter}) {
        if (to_string(role) == s) return role;
    }
    throw Error("TransportError", "unknown agent role '" + s + "'");
}

namespace {

json message_to_json(const AgentMessage& m) {
    json j;
    j["role"] = to_string(m.role);
    j["direction"] = m.direction == Direction::Request ? "request" : "response";
    j["content"] = m.content;
    if (m.image_ref) j["image_ref"] = *m.image_ref;
    j["timestamp"] = m.timestamp;
    if (m.token_cost) j["token_cost"] = *m.token_cost;
    return j;
}

AgentMessage message_from_json(const json& j) {
    AgentMessage m;
    m.role = agent_role_from_string(j.at("role").get<std::string>());
    auto dir = j.at("direction").get<std::string>();
    if (dir != "request" && dir != "response") {
        throw Error("TransportError", "bad message direction '" + dir + "'");
    }
    m.direction = dir == "request" ? Direction::Request : Direction::Response;
    m.content = j.at("content").get<std::string>();
    if (j.contains("image_ref")) m.image_ref = j["image_ref"].get<std::string>();
    if (j.contains("timestamp")) m.timestamp = j["timestamp"].get<std::string>();
    if (j.contains("token_cost")) m.token_cost = j["token_cost"].get<double>();
    return m;
}

}  // namespace

std::string to_jsonl(const Transcript& t) {
    std::ostringstream out;
    for (const auto& m : t.messages) {
        out << message_to_json(m).dump() << "\n";
    }
    return out.str();
}

Transcript transcript_from_jsonl(const std::string& text) {
    Transcript t;
    int line_no = 0;
    for (const auto& line : split_lines(text)) {
        ++line_no;
        auto trimmed = trim(line);
        if (trimmed.empty()) continue;
        json j;
        try {
            j = json::parse(trimmed);
        } catch (const std::exception& e) {
            throw Error("TransportError", "transcript line " + std::to_string(line_no) +
                                              ": " + e.what());
        }
        t.messages.push_back(message_from_json(j));
    }
    return t;
}

Transcript transcript_from_jsonl_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("TransportError", "cannot open transcript '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return transcript_from_jsonl(buf.str());
}

void write_jsonl_file(const Transcript& t, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("TransportError", "cannot write transcript '" + path + "'");
    out << to_jsonl(t);
}

}  // namespace simukit::orchestrator
