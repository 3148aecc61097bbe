#include "pse/profiles.hpp"

#include <algorithm>
#include <sstream>

#include "codec.hpp"
#include "pse/error.hpp"
#include "pse/text.hpp"

namespace pse {
namespace {

constexpr std::array<std::string_view, 7> kFieldNames = {
    "demographics", "hobbies", "favorite_books", "book_genres", "favorite_movies", "movie_genres", "favorite_music",
};

constexpr std::array<std::string_view, 4> kVariantNames = {
    "full",
    "full+entities",
    "no-book-fields",
    "demographics-hobbies",
};

std::string join(const std::vector<std::string>& parts)
{
    std::string out;
    for (const auto& p : parts) {
        if (p.find_first_not_of(" \t\r\n") == std::string::npos) {
            continue;
        }
        if (!out.empty()) {
            out += ' ';
        }
        out += p;
    }
    return out;
}

// Removes every whole-token occurrence of `mention` from `item`. Items that
// do not contain the mention are returned unchanged.
std::string strip_mention(const std::string& item, const TermSeq& mention)
{
    if (mention.empty()) {
        return item;
    }
    auto tokens = tokenize(item, false);
    TermSeq kept;
    bool removed = false;
    for (std::size_t i = 0; i < tokens.size();) {
        if (i + mention.size() <= tokens.size()
            && std::equal(mention.begin(), mention.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) {
            i += mention.size();
            removed = true;
        } else {
            kept.push_back(tokens[i]);
            ++i;
        }
    }
    return removed ? join(kept) : item;
}

std::vector<std::string> field_items(const UserProfile& p, ProfileField f)
{
    switch (f) {
    case ProfileField::Demographics: {
        std::vector<std::string> values;
        for (const auto& [key, value] : p.demographics) {
            values.push_back(value);
        }
        return values;
    }
    case ProfileField::Hobbies: return {p.hobbies};
    case ProfileField::FavoriteBooks: return p.favorite_books;
    case ProfileField::BookGenres: return p.book_genres;
    case ProfileField::FavoriteMovies: return p.favorite_movies;
    case ProfileField::MovieGenres: return p.movie_genres;
    case ProfileField::FavoriteMusic: return p.favorite_music;
    }
    return {};
}

}  // namespace

std::string_view field_name(ProfileField field) noexcept { return kFieldNames[static_cast<std::size_t>(field)]; }

std::optional<ProfileField> parse_field(std::string_view name) noexcept
{
    for (std::size_t i = 0; i < kFieldNames.size(); ++i) {
        if (kFieldNames[i] == name) {
            return static_cast<ProfileField>(i);
        }
    }
    return std::nullopt;
}

std::string_view variant_name(ProfileVariant v) noexcept { return kVariantNames[static_cast<std::size_t>(v)]; }

std::optional<ProfileVariant> parse_variant(std::string_view name) noexcept
{
    for (std::size_t i = 0; i < kVariantNames.size(); ++i) {
        if (kVariantNames[i] == name) {
            return static_cast<ProfileVariant>(i);
        }
    }
    return std::nullopt;
}

bool variant_admits(ProfileVariant variant, ProfileField field) noexcept
{
    switch (variant) {
    case ProfileVariant::Full:
    case ProfileVariant::FullPlusEntities: return true;
    case ProfileVariant::NoBookFields:
        return field != ProfileField::FavoriteBooks && field != ProfileField::BookGenres;
    case ProfileVariant::DemographicsHobbiesOnly:
        return field == ProfileField::Demographics || field == ProfileField::Hobbies;
    }
    return false;
}

std::vector<ProfileSegment> profile_segments(const UserProfile& profile, ProfileVariant variant)
{
    const bool with_entities = variant == ProfileVariant::FullPlusEntities;
    std::vector<ProfileSegment> out;
    for (auto field : kAllProfileFields) {
        if (!profile.enabled(field) || !variant_admits(variant, field)) {
            continue;
        }
        auto items = field_items(profile, field);
        if (with_entities) {
            for (const auto& e : profile.entities) {
                if (e.owner_field != field_name(field)) {
                    continue;
                }
                const auto mention = tokenize(e.mention, false);
                for (auto& item : items) {
                    item = strip_mention(item, mention);
                }
            }
        }
        auto text = join(items);
        if (!text.empty()) {
            out.push_back({std::string(field_name(field)), std::move(text)});
        }
    }
    if (with_entities) {
        for (const auto& e : profile.entities) {
            auto owner = parse_field(e.owner_field);
            if (owner && profile.enabled(*owner)) {
                out.push_back({std::string(kEntitySource), e.description});
            }
        }
    }
    return out;
}

std::string profile_text(const UserProfile& profile, ProfileVariant variant)
{
    std::string out;
    for (const auto& seg : profile_segments(profile, variant)) {
        if (!out.empty()) {
            out += ' ';
        }
        out += seg.text;
    }
    return out;
}

UserProfile attach_entities(const UserProfile& profile, std::span<const EntityDescription> descriptions)
{
    UserProfile out = profile;
    for (const auto& d : descriptions) {
        if (!parse_field(d.owner_field)) {
            throw Error("entity '" + d.entity_id + "' names unknown owner_field '" + d.owner_field + "'");
        }
        if (d.description.find_first_not_of(" \t\r\n") == std::string::npos) {
            throw Error("entity '" + d.entity_id + "' has an empty description");
        }
        out.entities.push_back(d);
    }
    return out;
}

ProfileMap read_profiles(std::istream& in, const std::string& source)
{
    ProfileMap out;
    codec::for_each_json_line(in, source, [&](const codec::json& j, const std::string& where) {
        auto p = codec::profile_from_json(j, where);
        auto id = p.user_id;
        if (!out.emplace(id, std::move(p)).second) {
            throw Error(where + ": duplicate user_id '" + id + "'");
        }
    });
    return out;
}

ProfileMap load_profiles(const std::string& path)
{
    auto in = codec::open_input(path);
    return read_profiles(in, path);
}

void save_profiles(const ProfileMap& profiles, const std::string& path)
{
    std::string content;
    for (const auto& [id, p] : profiles) {
        content += codec::profile_to_json(p, false).dump();
        content += '\n';
    }
    codec::write_text_file(path, content);
}

std::vector<EntityRecord> read_entity_records(std::istream& in, const std::string& source)
{
    std::vector<EntityRecord> out;
    codec::for_each_json_line(in, source, [&](const codec::json& j, const std::string& where) {
        EntityRecord r;
        r.user_id = codec::required_string(j, "user_id", where);
        r.entity.owner_field = codec::required_string(j, "owner_field", where);
        r.entity.mention = codec::optional_string(j, "mention", where);
        r.entity.entity_id = codec::optional_string(j, "entity_id", where);
        r.entity.description = codec::required_string(j, "description", where);
        if (!parse_field(r.entity.owner_field)) {
            throw Error(where + ": unknown owner_field '" + r.entity.owner_field + "'");
        }
        out.push_back(std::move(r));
    });
    return out;
}

std::vector<EntityRecord> load_entity_records(const std::string& path)
{
    auto in = codec::open_input(path);
    return read_entity_records(in, path);
}

void attach_entity_records(ProfileMap& profiles, std::span<const EntityRecord> records)
{
    for (const auto& r : records) {
        auto it = profiles.find(r.user_id);
        if (it == profiles.end()) {
            throw Error("entity description for unknown user '" + r.user_id + "'");
        }
        it->second = attach_entities(it->second, std::span(&r.entity, 1));
    }
}

}  // namespace pse
