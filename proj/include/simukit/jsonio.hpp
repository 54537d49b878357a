#pragma once

// JSON serialization for the machine-readable CLI outputs, the BuildScript IR
// file format, and RunRecords.

#include <json.hpp>

#include "simukit/codegen.hpp"
#include "simukit/conformance.hpp"
#include "simukit/diff.hpp"
#include "simukit/executor.hpp"
#include "simukit/orchestrator.hpp"

namespace simukit::jsonio {

nlohmann::json to_json(const conformance::ValidationReport& report);
nlohmann::json to_json(const diff::DiffResult& result);
nlohmann::json to_json(const codegen::BuildScript& script);
codegen::BuildScript script_from_json(const nlohmann::json& j);
codegen::BuildScript script_from_file(const std::string& path);
nlohmann::json to_json(const executor::ExecutionResult& result);
nlohmann::json to_json(const orchestrator::Transcript& transcript);
nlohmann::json to_json(const orchestrator::RunRecord& record);

}  // namespace simukit::jsonio
