#pragma once

// JSON helpers shared by the loaders and the HTTP service. Not installed.

#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pse/profiles.hpp"

namespace pse::codec {

using json = nlohmann::json;

std::ifstream open_input(const std::string& path);

/// Writes `content` to `path` through a temporary file and a rename, so
/// readers never observe a partially written file.
void write_text_file(const std::string& path, const std::string& content);

/// Calls `fn(object, "source:line")` for every non-blank line. Lines that are
/// not JSON objects raise pse::Error naming the line number.
void for_each_json_line(std::istream& in, const std::string& source,
                        const std::function<void(const json&, const std::string&)>& fn);

std::string required_string(const json& j, const char* key, const std::string& where);
std::string optional_string(const json& j, const char* key, const std::string& where);
std::vector<std::string> optional_string_list(const json& j, const char* key, const std::string& where);

json profile_to_json(const UserProfile& p, bool include_entities);
/// Parses the profile record schema. Unknown keys are rejected so that
/// misspelled field names surface as errors.
UserProfile profile_from_json(const json& j, const std::string& where);

json entity_to_json(const EntityDescription& e);

}  // namespace pse::codec
