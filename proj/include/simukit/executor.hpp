#pragma once

// Execute a BuildScript against a real external MATLAB process, or via the
// built-in dry run that models line-attachment legality.

#include <map>
#include <optional>
#include <string>

#include "simukit/codegen.hpp"
#include "simukit/kb.hpp"

namespace simukit::executor {

struct ExecutionResult {
    enum class Status { Ok, Failed };

    Status status = Status::Ok;
    std::optional<std::size_t> failed_command_index;  // into script.commands
    std::string error_message;
    double wall_time_s = 0.0;
    std::map<std::string, int> port_occupancy;  // "Block/Port" -> line count
    std::string raw_output;                     // external runs: full diagnostics

    bool ok() const { return status == Status::Ok; }
};

// The line-attachment rules the dry run enforces. Calibrated against the one
// observable MATLAB data point; swap a different policy in to re-calibrate.
struct AttachmentPolicy {
    // (a) a dedicated-input port with an existing line rejects further lines.
    bool reject_second_input_line = true;
    // (b) a conserving-conserving line is rejected iff BOTH endpoints already
    //     have at least one attached line; otherwise it branches.
    bool reject_conserving_when_both_occupied = true;
};

// MATLAB's wording for both (a) and (b).
inline constexpr const char* kSecondLineMessage =
    "The second port already has a line connection";

// Interprets the commands in order; the first violation aborts with its index
// and a MATLAB-style message. Never throws; deterministic and total.
ExecutionResult dry_run(const codegen::BuildScript& script, const kb::KnowledgeBase& kb,
                        const AttachmentPolicy& policy = {});

struct ExternalConfig {
    std::string matlab_launcher;
    double timeout_s = 600.0;
    std::string temp_dir;  // empty: system temp
};

// Key = value config file; keys: matlab_launcher, timeout_s, temp_dir.
ExternalConfig load_config(const std::string& path);

// Renders the script, invokes the launcher in batch mode in a private temp
// directory, and maps exit status/stderr onto an ExecutionResult. Throws
// LauncherNotFound and Timeout.
ExecutionResult run_external(const codegen::BuildScript& script,
                             const ExternalConfig& config);

}  // namespace simukit::executor
