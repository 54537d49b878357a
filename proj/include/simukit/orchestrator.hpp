#pragma once

// The six-agent workflow as an explicit state machine over a pluggable agent
// transport, with transcript recording/replay, directive extraction, retry
// limits, and deterministic report rendering.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "simukit/codegen.hpp"
#include "simukit/conformance.hpp"
#include "simukit/directive.hpp"
#include "simukit/executor.hpp"
#include "simukit/kb.hpp"
#include "simukit/netlist.hpp"
#include "simukit/prompts.hpp"
#include "simukit/transcript.hpp"

namespace simukit::orchestrator {

enum class WorkflowState {
    Investigate1,
    Investigate2,
    Review,
    Build,
    Execute,
    DebugLocate,
    Report,
    Done,
    Failed,
};

std::string to_string(WorkflowState s);

enum class EventKind {
    BlockListReady,    // Investigate1: block list + request_blocks arrived
    NetlistReady,      // Investigate2: connection description arrived
    ReviewPassed,
    ReviewFailed,
    BuildDone,
    ExecutionOk,
    ExecutionFailed,
    InvestigatorError,  // DebugLocate verdict: Investigator_error = true
    BuilderError,       // DebugLocate verdict: Investigator_error = false
    ReportWritten,
};

struct Limits {
    int max_review = 3;  // failed review rounds
    int max_build = 5;   // build cycles
};

struct Counters {
    int review_rounds = 0;
    int build_cycles = 0;
};

// Pure transition table. Throws IllegalTransition on undefined pairs.
WorkflowState step(WorkflowState state, EventKind event);

// step() plus counter bookkeeping; any limit breach yields Failed.
WorkflowState advance(WorkflowState state, EventKind event, Counters& counters,
                      const Limits& limits);

// ── Transport ───────────────────────────────────────────────────────────────

struct TransportRequest {
    AgentRole role = AgentRole::Investigator;
    std::string prompt;
    std::optional<std::string> image;  // base64 or path
    std::string model_id;
};

struct TransportResponse {
    std::string text;
    double token_cost = 0.0;
};

class Transport {
public:
    virtual ~Transport() = default;
    virtual TransportResponse send(const TransportRequest& request) = 0;
};

// Replays recorded agent responses in order; the run is bit-reproducible.
class ReplayTransport final : public Transport {
public:
    explicit ReplayTransport(Transcript recorded);
    static ReplayTransport from_file(const std::string& path);

    TransportResponse send(const TransportRequest& request) override;

    // Timestamp recorded with the response most recently returned.
    const std::string& last_timestamp() const { return last_timestamp_; }

private:
    Transcript recorded_;
    std::size_t cursor_ = 0;
    std::string last_timestamp_;
};

// HTTP JSON chat-completions-style endpoint.
class HttpTransport final : public Transport {
public:
    explicit HttpTransport(std::string endpoint_url);
    TransportResponse send(const TransportRequest& request) override;

private:
    std::string endpoint_url_;
};

// ── Pipeline ────────────────────────────────────────────────────────────────

enum class ExecutorBackend { DryRun, External };

struct TaskInputs {
    std::string task_name = "task";
    std::string simulation_explanation;
    std::string model_name = "model";
    std::optional<std::string> image_path;
    std::map<std::string, std::string> model_ids;  // role name -> model id
};

struct PipelineOptions {
    Limits limits;
    ExecutorBackend backend = ExecutorBackend::DryRun;
    executor::ExternalConfig external;
    // Timestamp source for recorded messages; replay runs pin it for
    // bit-reproducibility.
    std::function<std::string()> clock;
};

struct RunRecord {
    WorkflowState final_state = WorkflowState::Failed;
    netlist::Netlist net;
    conformance::ValidationReport validation;
    codegen::BuildScript script;
    std::vector<executor::ExecutionResult> executions;
    std::string report_doc;
    double cost_usd = 0.0;
    double wall_time_s = 0.0;
    Transcript transcript;
    std::string failure_reason;  // LimitExceeded details etc.
};

// Drives step() to Done or Failed, recording the full transcript.
// Throws TransportError when the transport itself fails or diverges.
RunRecord run_pipeline(const TaskInputs& task, const kb::KnowledgeBase& kb,
                       Transport& transport, const PipelineOptions& options = {});

// Deterministic four-section report (template mode). `descriptions` maps block
// type to its opaque description payload; missing entries render placeholder
// notices.
std::string write_report(const netlist::Netlist& n, const kb::KnowledgeBase& kb,
                         const codegen::BuildScript& script,
                         const std::map<std::string, std::string>& descriptions);

}  // namespace simukit::orchestrator
