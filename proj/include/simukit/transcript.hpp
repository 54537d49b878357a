#pragma once

// Agent exchange records and their line-delimited JSON form (one AgentMessage
// per line).

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace simukit::orchestrator {

enum class AgentRole {
    Investigator,
    UnitTestReviewer,
    BlockBuilder,
    Executor,
    DebugLocator,
    ReportWriter,
};

std::string to_string(AgentRole role);
AgentRole agent_role_from_string(const std::string& s);

enum class Direction { Request, Response };

struct AgentMessage {
    AgentRole role = AgentRole::Investigator;
    Direction direction = Direction::Request;
    std::string content;
    std::optional<std::string> image_ref;  // Investigator requests only
    std::string timestamp;
    std::optional<double> token_cost;

    bool operator==(const AgentMessage&) const = default;
};

struct Transcript {
    std::vector<AgentMessage> messages;
    std::map<std::string, std::string> metadata;  // task name, model ids

    bool operator==(const Transcript&) const = default;
};

std::string to_jsonl(const Transcript& t);
Transcript transcript_from_jsonl(const std::string& text);
Transcript transcript_from_jsonl_file(const std::string& path);
void write_jsonl_file(const Transcript& t, const std::string& path);

}  // namespace simukit::orchestrator
