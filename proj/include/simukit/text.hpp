#pragma once

// Small string helpers shared by the parsers and renderers.

#include <string>
#include <string_view>
#include <vector>

namespace simukit {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

// Lowercase, trimmed, internal whitespace runs collapsed to one space.
// Used for every case-insensitive identifier comparison (block types,
// display names, KB keys).
std::string normalize_key(std::string_view s);

// Split into lines; '\r' stripped, empty lines kept.
std::vector<std::string> split_lines(std::string_view text);

bool starts_with(std::string_view s, std::string_view prefix);
bool ends_with(std::string_view s, std::string_view suffix);

std::size_t edit_distance(std::string_view a, std::string_view b);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace simukit
