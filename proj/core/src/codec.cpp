#include "codec.hpp"

#include <cstdio>
#include <set>
#include <sstream>

#include "pse/error.hpp"

namespace pse::codec {

std::ifstream open_input(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open '" + path + "'");
    }
    return in;
}

void write_text_file(const std::string& path, const std::string& content)
{
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error("cannot open '" + tmp + "' for writing");
        }
        out << content;
        out.flush();
        if (!out) {
            throw Error("write failed for '" + tmp + "'");
        }
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw Error("cannot move '" + tmp + "' to '" + path + "'");
    }
}

void for_each_json_line(std::istream& in, const std::string& source,
                        const std::function<void(const json&, const std::string&)>& fn)
{
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        const std::string where = source + ":" + std::to_string(line_no);
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw Error(where + ": malformed JSON (" + std::string(e.what()) + ")");
        }
        if (!j.is_object()) {
            throw Error(where + ": expected a JSON object");
        }
        try {
            fn(j, where);
        } catch (const json::exception& e) {
            throw Error(where + ": " + e.what());
        }
    }
}

std::string required_string(const json& j, const char* key, const std::string& where)
{
    auto it = j.find(key);
    if (it == j.end() || !it->is_string() || it->get_ref<const std::string&>().empty()) {
        throw Error(where + ": missing or empty string field '" + key + "'");
    }
    return it->get<std::string>();
}

std::string optional_string(const json& j, const char* key, const std::string& where)
{
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
        return {};
    }
    if (!it->is_string()) {
        throw Error(where + ": field '" + key + "' must be a string");
    }
    return it->get<std::string>();
}

std::vector<std::string> optional_string_list(const json& j, const char* key, const std::string& where)
{
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
        return {};
    }
    if (!it->is_array()) {
        throw Error(where + ": field '" + key + "' must be an array of strings");
    }
    std::vector<std::string> out;
    for (const auto& v : *it) {
        if (!v.is_string()) {
            throw Error(where + ": field '" + key + "' must be an array of strings");
        }
        out.push_back(v.get<std::string>());
    }
    return out;
}

json entity_to_json(const EntityDescription& e)
{
    return {{"owner_field", e.owner_field},
            {"mention", e.mention},
            {"entity_id", e.entity_id},
            {"description", e.description}};
}

json profile_to_json(const UserProfile& p, bool include_entities)
{
    json j = json::object();
    j["user_id"] = p.user_id;
    j["demographics"] = json(p.demographics);
    j["hobbies"] = p.hobbies;
    j["favorite_books"] = p.favorite_books;
    j["book_genres"] = p.book_genres;
    j["favorite_movies"] = p.favorite_movies;
    j["movie_genres"] = p.movie_genres;
    j["favorite_music"] = p.favorite_music;
    json enabled = json::object();
    for (auto f : kAllProfileFields) {
        enabled[std::string(field_name(f))] = p.enabled(f);
    }
    j["field_enabled"] = std::move(enabled);
    if (include_entities) {
        json ents = json::array();
        for (const auto& e : p.entities) {
            ents.push_back(entity_to_json(e));
        }
        j["entities"] = std::move(ents);
    }
    return j;
}

UserProfile profile_from_json(const json& j, const std::string& where)
{
    static const std::set<std::string> known = {"user_id",        "demographics",  "hobbies",
                                                "favorite_books", "book_genres",   "favorite_movies",
                                                "movie_genres",   "favorite_music", "field_enabled",
                                                "entities"};
    if (!j.is_object()) {
        throw Error(where + ": profile must be a JSON object");
    }
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) {
            throw Error(where + ": unknown profile field '" + key + "'");
        }
    }
    UserProfile p;
    p.user_id = required_string(j, "user_id", where);
    if (auto it = j.find("demographics"); it != j.end() && !it->is_null()) {
        if (!it->is_object()) {
            throw Error(where + ": 'demographics' must be an object of strings");
        }
        for (const auto& [key, value] : it->items()) {
            if (!value.is_string()) {
                throw Error(where + ": demographic '" + key + "' must be a string");
            }
            p.demographics.emplace(key, value.get<std::string>());
        }
    }
    p.hobbies = optional_string(j, "hobbies", where);
    p.favorite_books = optional_string_list(j, "favorite_books", where);
    p.book_genres = optional_string_list(j, "book_genres", where);
    p.favorite_movies = optional_string_list(j, "favorite_movies", where);
    p.movie_genres = optional_string_list(j, "movie_genres", where);
    p.favorite_music = optional_string_list(j, "favorite_music", where);
    if (auto it = j.find("field_enabled"); it != j.end() && !it->is_null()) {
        if (!it->is_object()) {
            throw Error(where + ": 'field_enabled' must be an object of booleans");
        }
        for (const auto& [key, value] : it->items()) {
            auto field = parse_field(key);
            if (!field) {
                throw Error(where + ": unknown field '" + key + "' in field_enabled");
            }
            if (!value.is_boolean()) {
                throw Error(where + ": field_enabled." + key + " must be a boolean");
            }
            p.set_enabled(*field, value.get<bool>());
        }
    }
    if (auto it = j.find("entities"); it != j.end() && !it->is_null()) {
        if (!it->is_array()) {
            throw Error(where + ": 'entities' must be an array");
        }
        std::vector<EntityDescription> ents;
        for (const auto& e : *it) {
            if (!e.is_object()) {
                throw Error(where + ": entity entries must be objects");
            }
            EntityDescription d;
            d.owner_field = required_string(e, "owner_field", where);
            d.mention = optional_string(e, "mention", where);
            d.entity_id = optional_string(e, "entity_id", where);
            d.description = required_string(e, "description", where);
            ents.push_back(std::move(d));
        }
        p = attach_entities(p, ents);
    }
    return p;
}

}  // namespace pse::codec
