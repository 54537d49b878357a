#pragma once

// Extraction of the JSON-ish control flags agents emit at the end of their
// responses: "request_blocks", "Investigator_unit_test_pass",
// "Investigator_error".

#include <string>
#include <vector>

namespace simukit::orchestrator {

struct Directive {
    enum class Type { Bool, List };

    std::string key;
    Type type = Type::Bool;
    bool bool_value = false;
    std::vector<std::string> list_value;
};

// Locates the last fenced or brace-delimited object in the text that carries
// the key. Tolerant of unquoted True/False booleans, single quotes, trailing
// commas, and parenthesized asides after a value. Throws DirectiveNotFound
// and DirectiveMalformed.
Directive extract_directive(const std::string& text, const std::string& key);

}  // namespace simukit::orchestrator
