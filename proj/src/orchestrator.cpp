#include "simukit/orchestrator.hpp"

#include <chrono>
#include <set>
#include <sstream>

#include "simukit/error.hpp"
#include "simukit/text.hpp"

namespace simukit::orchestrator {

std::string to_string(WorkflowState s) {
    switch (s) {
        case WorkflowState::Investigate1: return "Investigate1";
        case WorkflowState::Investigate2: return "Investigate2";
        case WorkflowState::Review: return "Review";
        case WorkflowState::Build: return "Build";
        case WorkflowState::Execute: return "Execute";
        case WorkflowState::DebugLocate: return "DebugLocate";
        case WorkflowState::Report: return "Report";
        case WorkflowState::Done: return "Done";
        case WorkflowState::Failed: return "Failed";
    }
    return "?";
}

WorkflowState step(WorkflowState state, EventKind event) {
    switch (state) {
        case WorkflowState::Investigate1:
            if (event == EventKind::BlockListReady) return WorkflowState::Investigate2;
            break;
        case WorkflowState::Investigate2:
            if (event == EventKind::NetlistReady) return WorkflowState::Review;
            break;
        case WorkflowState::Review:
            if (event == EventKind::ReviewPassed) return WorkflowState::Build;
            if (event == EventKind::ReviewFailed) return WorkflowState::Investigate2;
            break;
        case WorkflowState::Build:
            if (event == EventKind::BuildDone) return WorkflowState::Execute;
            break;
        case WorkflowState::Execute:
            if (event == EventKind::ExecutionOk) return WorkflowState::Report;
            if (event == EventKind::ExecutionFailed) return WorkflowState::DebugLocate;
            break;
        case WorkflowState::DebugLocate:
            // An Investigator-side flaw goes back through review; a
            // builder-side fault is fixed without bypassing the Investigator.
            if (event == EventKind::InvestigatorError) return WorkflowState::Review;
            if (event == EventKind::BuilderError) return WorkflowState::Build;
            break;
        case WorkflowState::Report:
            if (event == EventKind::ReportWritten) return WorkflowState::Done;
            break;
        case WorkflowState::Done:
        case WorkflowState::Failed:
            break;
    }
    throw Error("IllegalTransition", "no transition from " + to_string(state) +
                                         " on event " + std::to_string(static_cast<int>(event)));
}

WorkflowState advance(WorkflowState state, EventKind event, Counters& counters,
                      const Limits& limits) {
    auto next = step(state, event);
    if (event == EventKind::ReviewFailed) {
        ++counters.review_rounds;
        if (counters.review_rounds > limits.max_review) return WorkflowState::Failed;
    }
    if (next == WorkflowState::Build) {
        ++counters.build_cycles;
        if (counters.build_cycles > limits.max_build) return WorkflowState::Failed;
    }
    return next;
}

// ── ReplayTransport ─────────────────────────────────────────────────────────

ReplayTransport::ReplayTransport(Transcript recorded) : recorded_(std::move(recorded)) {}

ReplayTransport ReplayTransport::from_file(const std::string& path) {
    return ReplayTransport(transcript_from_jsonl_file(path));
}

TransportResponse ReplayTransport::send(const TransportRequest& request) {
    while (cursor_ < recorded_.messages.size() &&
           recorded_.messages[cursor_].direction != Direction::Response) {
        ++cursor_;  // recorded requests are informational
    }
    if (cursor_ >= recorded_.messages.size()) {
        throw Error("TransportError", "replay exhausted: no recorded response for " +
                                          to_string(request.role));
    }
    const auto& m = recorded_.messages[cursor_++];
    if (m.role != request.role) {
        throw Error("TransportError", "replay divergence: next recorded response is for " +
                                          to_string(m.role) + ", pipeline asked for " +
                                          to_string(request.role));
    }
    last_timestamp_ = m.timestamp;
    TransportResponse resp;
    resp.text = m.content;
    resp.token_cost = m.token_cost.value_or(0.0);
    return resp;
}

// ── HttpTransport ───────────────────────────────────────────────────────────

HttpTransport::HttpTransport(std::string endpoint_url)
    : endpoint_url_(std::move(endpoint_url)) {}

// Defined in transport_http.cpp (keeps the heavy HTTP header out of this TU).

// ── Pipeline ────────────────────────────────────────────────────────────────

namespace {

std::string iso_now() {
    auto now = std::chrono::system_clock::now();
    auto t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Response text minus fenced blocks and the trailing JSON directive, leaving
// the netlist payload lines.
std::string strip_directives(const std::string& text) {
    std::string out;
    bool fenced = false;
    int brace_depth = 0;
    for (const auto& line : split_lines(text)) {
        auto t = trim(line);
        if (starts_with(t, "```")) {
            fenced = !fenced;
            continue;
        }
        if (fenced) continue;
        if (brace_depth == 0 && starts_with(t, "{")) {
            for (char c : t) {
                if (c == '{') ++brace_depth;
                if (c == '}') --brace_depth;
            }
            continue;
        }
        if (brace_depth > 0) {
            for (char c : t) {
                if (c == '{') ++brace_depth;
                if (c == '}') --brace_depth;
            }
            continue;
        }
        out += line;
        out += '\n';
    }
    return out;
}

struct Pipeline {
    const TaskInputs& task;
    const kb::KnowledgeBase& kb;
    Transport& transport;
    const PipelineOptions& options;

    RunRecord record;
    Counters counters;
    std::function<std::string()> clock;

    std::vector<netlist::BlockInstance> blocks;
    std::string descriptions_context;
    std::map<std::string, std::string> descriptions;  // type -> record text
    std::string last_review_text;
    std::string last_parse_error;
    executor::ExecutionResult last_execution;

    std::string model_id_for(AgentRole role) {
        auto it = task.model_ids.find(to_string(role));
        if (it != task.model_ids.end()) return it->second;
        it = task.model_ids.find("default");
        return it != task.model_ids.end() ? it->second : "";
    }

    std::string exchange(AgentRole role, const std::string& prompt,
                         std::optional<std::string> image = std::nullopt) {
        AgentMessage req;
        req.role = role;
        req.direction = Direction::Request;
        req.content = prompt;
        req.image_ref = std::move(image);
        req.timestamp = clock();
        record.transcript.messages.push_back(req);

        TransportRequest treq;
        treq.role = role;
        treq.prompt = prompt;
        treq.image = req.image_ref;
        treq.model_id = model_id_for(role);
        auto resp = transport.send(treq);

        AgentMessage rsp;
        rsp.role = role;
        rsp.direction = Direction::Response;
        rsp.content = resp.text;
        rsp.timestamp = clock();
        rsp.token_cost = resp.token_cost;
        record.transcript.messages.push_back(rsp);
        record.cost_usd += resp.token_cost;
        return resp.text;
    }

    void investigate_round1() {
        PromptContext ctx{
            {"simulation_explanation", task.simulation_explanation},
            {"simulation_blocks_list", join(kb.block_types(), "\n")},
        };
        auto text = exchange(AgentRole::Investigator,
                             render_prompt(PromptKind::InvestigatorRound1, ctx),
                             task.image_path);

        blocks = netlist::parse_block_list(strip_directives(text));
        record.net.blocks = blocks;

        auto directive = extract_directive(text, "request_blocks");
        std::ostringstream out;
        std::set<std::string> seen;
        for (const auto& type : directive.list_value) {
            auto key = normalize_key(type);
            if (!seen.insert(key).second) continue;
            try {
                descriptions[key] = kb.record_text(type);
                out << descriptions[key] << "\n\n";
            } catch (const Error& e) {
                // A requested type outside the library is an Investigator
                // hallucination; surface it in the context.
                out << "ERROR: " << e.what() << "\n\n";
            }
        }
        descriptions_context = out.str();
    }

    void investigate_round2() {
        auto prompt = render_prompt(PromptKind::InvestigatorRound2,
                                    {{"simulation_blocks_list", descriptions_context}});
        if (!last_review_text.empty()) {
            prompt += "\n# REVIEWER FEEDBACK #\n" + last_review_text + "\n";
        }
        auto text = exchange(AgentRole::Investigator, prompt);

        last_parse_error.clear();
        try {
            record.net.blocks = blocks;
            record.net.connections =
                netlist::parse_connections(strip_directives(text), blocks);
        } catch (const Error& e) {
            record.net.connections.clear();
            last_parse_error = e.what();
        }
    }

    bool review() {
        PromptContext ctx{
            {"blocks_list", descriptions_context},
            {"investigator_simulation_info", netlist::render(record.net)},
        };
        auto text = exchange(AgentRole::UnitTestReviewer,
                             render_prompt(PromptKind::UnitTestReviewer, ctx));
        last_review_text = text;
        bool pass = extract_directive(text, "Investigator_unit_test_pass").bool_value;
        if (!last_parse_error.empty()) {
            // An unparseable connection description can never pass review.
            last_review_text += "\nFormatting error: " + last_parse_error;
            return false;
        }
        return pass;
    }

    void build() {
        try {
            record.script = codegen::lower(record.net, kb, task.model_name,
                                           codegen::LowerOptions{false});
        } catch (const Error& e) {
            // Unknown types surface as an immediate execution failure, which
            // routes through the Debug Locator like any other runtime error.
            record.script = codegen::BuildScript{task.model_name, {}};
            last_execution = executor::ExecutionResult{};
            last_execution.status = executor::ExecutionResult::Status::Failed;
            last_execution.failed_command_index = 0;
            last_execution.error_message = e.what();
        }
        PromptContext ctx{
            {"code_template", builder_code_template()},
            {"functions", permitted_functions()},
            {"blocks_description", descriptions_context},
            {"investigator_agent_information", netlist::render(record.net)},
        };
        exchange(AgentRole::BlockBuilder, render_prompt(PromptKind::BlockBuilder, ctx));
    }

    bool execute() {
        if (!record.script.commands.empty()) {
            last_execution = options.backend == ExecutorBackend::DryRun
                                 ? executor::dry_run(record.script, kb)
                                 : executor::run_external(record.script, options.external);
        }
        record.executions.push_back(last_execution);
        return last_execution.ok();
    }

    bool debug_locate() {
        std::string error = last_execution.error_message;
        if (last_execution.failed_command_index) {
            error += " (command index " +
                     std::to_string(*last_execution.failed_command_index) + ")";
        }
        PromptContext ctx{
            {"execution_code", codegen::render_engine_script(record.script)},
            {"error_message", error},
            {"functions_set", permitted_functions()},
            {"blocks_description", descriptions_context},
            {"investigator_implementation_info", netlist::render(record.net)},
        };
        auto text = exchange(AgentRole::DebugLocator,
                             render_prompt(PromptKind::DebugLocator, ctx));
        return extract_directive(text, "Investigator_error").bool_value;
    }

    void report() {
        PromptContext ctx{
            {"simulation_description", task.simulation_explanation},
            {"used_block_description", descriptions_context},
            {"connection_description", netlist::render(record.net)},
            {"execution_code", codegen::render_engine_script(record.script)},
        };
        record.report_doc =
            exchange(AgentRole::ReportWriter, render_prompt(PromptKind::ReportWriter, ctx));
    }

    RunRecord run() {
        auto started = std::chrono::steady_clock::now();
        record.transcript.metadata["task"] = task.task_name;
        for (const auto& [role, id] : task.model_ids) {
            record.transcript.metadata["model:" + role] = id;
        }

        auto state = WorkflowState::Investigate1;
        while (state != WorkflowState::Done && state != WorkflowState::Failed) {
            switch (state) {
                case WorkflowState::Investigate1:
                    investigate_round1();
                    state = advance(state, EventKind::BlockListReady, counters,
                                    options.limits);
                    break;
                case WorkflowState::Investigate2:
                    investigate_round2();
                    state = advance(state, EventKind::NetlistReady, counters,
                                    options.limits);
                    break;
                case WorkflowState::Review: {
                    bool pass = review();
                    state = advance(state,
                                    pass ? EventKind::ReviewPassed
                                         : EventKind::ReviewFailed,
                                    counters, options.limits);
                    if (state == WorkflowState::Failed) {
                        record.failure_reason =
                            "LimitExceeded: review_rounds > " +
                            std::to_string(options.limits.max_review);
                    }
                    break;
                }
                case WorkflowState::Build:
                    build();
                    state = advance(state, EventKind::BuildDone, counters, options.limits);
                    break;
                case WorkflowState::Execute: {
                    bool ok = execute();
                    state = advance(state,
                                    ok ? EventKind::ExecutionOk
                                       : EventKind::ExecutionFailed,
                                    counters, options.limits);
                    break;
                }
                case WorkflowState::DebugLocate: {
                    bool investigator_error = debug_locate();
                    state = advance(state,
                                    investigator_error ? EventKind::InvestigatorError
                                                       : EventKind::BuilderError,
                                    counters, options.limits);
                    if (state == WorkflowState::Failed) {
                        record.failure_reason = "LimitExceeded: build_cycles > " +
                                                std::to_string(options.limits.max_build);
                    }
                    break;
                }
                case WorkflowState::Report:
                    report();
                    state = advance(state, EventKind::ReportWritten, counters,
                                    options.limits);
                    break;
                default:
                    throw Error("IllegalTransition", "pipeline reached " + to_string(state));
            }
            // Entering Build past its limit is also a breach.
            if (state == WorkflowState::Failed && record.failure_reason.empty()) {
                record.failure_reason = "LimitExceeded: build_cycles > " +
                                        std::to_string(options.limits.max_build);
            }
        }

        record.final_state = state;
        record.validation = conformance::validate(record.net, kb);
        record.wall_time_s = std::chrono::duration<double>(
                                 std::chrono::steady_clock::now() - started)
                                 .count();
        return std::move(record);
    }
};

}  // namespace

RunRecord run_pipeline(const TaskInputs& task, const kb::KnowledgeBase& kb,
                       Transport& transport, const PipelineOptions& options) {
    Pipeline p{task, kb, transport, options};
    p.clock = options.clock ? options.clock : iso_now;
    return p.run();
}

// ── Report writer (template mode) ───────────────────────────────────────────

namespace {

std::string command_line(const codegen::BuildCommand& cmd) {
    codegen::BuildScript one;
    one.model_name = std::visit(
        [](const auto& c) -> std::string {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, codegen::AddBlock>) {
                auto slash = c.dest_path.find('/');
                return slash == std::string::npos ? c.dest_path
                                                  : c.dest_path.substr(0, slash);
            } else if constexpr (std::is_same_v<T, codegen::SetParam>) {
                auto slash = c.block_path.find('/');
                return slash == std::string::npos ? c.block_path
                                                  : c.block_path.substr(0, slash);
            } else if constexpr (std::is_same_v<T, codegen::AddLine>) {
                return c.model;
            } else {
                return c.model;
            }
        },
        cmd);
    one.commands.push_back(cmd);
    auto text = codegen::render_matlab(one);
    // Drop the "model = ..." preamble; keep the single call.
    auto lines = split_lines(text);
    return lines.size() >= 2 ? lines[1] : text;
}

}  // namespace

std::string write_report(const netlist::Netlist& n, const kb::KnowledgeBase& kb,
                         const codegen::BuildScript& script,
                         const std::map<std::string, std::string>& descriptions) {
    std::ostringstream out;
    out << "# Simulation Report: " << script.model_name << "\n";

    out << "\n## 1. What is the simulation about?\n\n";
    out << "The model `" << script.model_name << "` reproduces a block diagram with "
        << n.blocks.size() << " blocks and " << n.connections.size()
        << " connections. Blocks used:\n\n";
    for (const auto& b : n.blocks) {
        out << "- " << b.name << " (" << b.block_type << ")\n";
    }

    out << "\n## 2. What are the main simulation steps?\n\n";
    out << "1. Create and open the model `" << script.model_name << "`.\n";
    out << "2. Add the " << n.blocks.size()
        << " blocks from their library paths and set the port-count parameters.\n";
    out << "3. Wire the " << n.connections.size() << " connections:\n";
    for (const auto& c : n.connections) {
        out << "   - " << c.src.block_name << "/" << c.src.port << " to "
            << c.dst.block_name << "/" << c.dst.port << "\n";
    }
    out << "4. Arrange the diagram and save the model.\n";

    out << "\n## 3. What theoretical knowledge and mathematical modeling are involved "
           "in each step?\n\n";
    std::set<std::string> seen;
    for (const auto& b : n.blocks) {
        auto key = normalize_key(b.block_type);
        if (!seen.insert(key).second) continue;
        out << "### " << b.block_type << "\n\n";
        auto it = descriptions.find(key);
        if (it == descriptions.end()) {
            for (const auto& [k, v] : descriptions) {
                if (normalize_key(k) == key) {
                    it = descriptions.find(k);
                    break;
                }
            }
        }
        if (it != descriptions.end() && !it->second.empty()) {
            out << it->second << "\n\n";
        } else if (const auto* desc = kb.find(b.block_type)) {
            out << "Library path `" << desc->library_path << "` with "
                << desc->ports.size() << " declared ports.\n\n";
        } else {
            out << "(no description available)\n\n";
        }
    }

    out << "## 4. How is each step implemented in code?\n\n";
    out << "```matlab\n";
    for (const auto& cmd : script.commands) {
        out << command_line(cmd) << "\n";
    }
    out << "```\n";
    return out.str();
}

}  // namespace simukit::orchestrator
