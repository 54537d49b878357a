#pragma once

// Shipped prompt templates for the six agent roles, with {placeholder}
// substitution. Rendering is byte-stable for a given context.

#include <map>
#include <string>

namespace simukit::orchestrator {

enum class PromptKind {
    InvestigatorRound1,
    InvestigatorRound2,
    UnitTestReviewer,
    BlockBuilder,
    DebugLocator,
    ReportWriter,
};

using PromptContext = std::map<std::string, std::string>;

const std::string& prompt_template(PromptKind kind);

// Substitutes every {snake_case} placeholder. Throws MissingPlaceholder when
// the context lacks one the template needs.
std::string render_prompt(PromptKind kind, const PromptContext& context);

// Opaque payloads handed to the Block Builder / Debug Locator prompts.
const std::string& builder_code_template();
const std::string& permitted_functions();

}  // namespace simukit::orchestrator
