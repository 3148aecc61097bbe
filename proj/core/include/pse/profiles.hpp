#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pse {

/// Questionnaire fields, in the fixed order used to assemble profile text.
enum class ProfileField {
    Demographics,
    Hobbies,
    FavoriteBooks,
    BookGenres,
    FavoriteMovies,
    MovieGenres,
    FavoriteMusic,
};

inline constexpr std::array kAllProfileFields = {
    ProfileField::Demographics,   ProfileField::Hobbies,     ProfileField::FavoriteBooks,
    ProfileField::BookGenres,     ProfileField::FavoriteMovies, ProfileField::MovieGenres,
    ProfileField::FavoriteMusic,
};

std::string_view field_name(ProfileField field) noexcept;
std::optional<ProfileField> parse_field(std::string_view name) noexcept;

/// A linked entity mention with its first-paragraph style description.
/// `owner_field` is kept as text and validated by attach_entities().
struct EntityDescription {
    std::string owner_field;
    std::string mention;
    std::string entity_id;
    std::string description;

    bool operator==(const EntityDescription&) const = default;
};

struct UserProfile {
    std::string user_id;
    std::map<std::string, std::string> demographics;  // age, gender, location, ...
    std::string hobbies;
    std::vector<std::string> favorite_books;
    std::vector<std::string> book_genres;
    std::vector<std::string> favorite_movies;
    std::vector<std::string> movie_genres;
    std::vector<std::string> favorite_music;
    std::vector<EntityDescription> entities;

    /// Scrutability toggles; every field starts enabled.
    std::map<ProfileField, bool> field_enabled = default_enabled();

    bool enabled(ProfileField f) const
    {
        auto it = field_enabled.find(f);
        return it == field_enabled.end() || it->second;
    }
    void set_enabled(ProfileField f, bool on) { field_enabled[f] = on; }

    bool operator==(const UserProfile&) const = default;

    static std::map<ProfileField, bool> default_enabled()
    {
        std::map<ProfileField, bool> m;
        for (auto f : kAllProfileFields) {
            m[f] = true;
        }
        return m;
    }
};

enum class ProfileVariant {
    Full,
    FullPlusEntities,
    NoBookFields,             // drops favorite_books and book_genres
    DemographicsHobbiesOnly,  // keeps demographics and hobbies only
};

std::string_view variant_name(ProfileVariant v) noexcept;
std::optional<ProfileVariant> parse_variant(std::string_view name) noexcept;

/// True when `variant` admits `field` (before field_enabled is applied).
bool variant_admits(ProfileVariant variant, ProfileField field) noexcept;

/// Label used for text contributed by attached entity descriptions.
inline constexpr std::string_view kEntitySource = "entity-description";

/// One contiguous piece of profile text and where it came from: a field name
/// or kEntitySource.
struct ProfileSegment {
    std::string source;
    std::string text;
};

/// Ordered pieces of the profile text for `variant`. Disabled fields and
/// fields the variant excludes contribute nothing. Entity descriptions are
/// only emitted for FullPlusEntities; in that variant every mention that has
/// a description is cut out of its owner field (whole-token, case-insensitive).
/// Descriptions whose owner field is disabled are dropped with the field.
std::vector<ProfileSegment> profile_segments(const UserProfile& profile, ProfileVariant variant);

/// Space-joined profile_segments(). May be empty if everything is revoked.
std::string profile_text(const UserProfile& profile, ProfileVariant variant);

/// Returns a copy of `profile` carrying `descriptions` in addition to any it
/// already had. Throws pse::Error for an unknown owner_field or an empty
/// description.
UserProfile attach_entities(const UserProfile& profile, std::span<const EntityDescription> descriptions);

using ProfileMap = std::map<std::string, UserProfile>;

/// JSON-lines profiles file. Errors on duplicate or missing user_id.
ProfileMap read_profiles(std::istream& in, const std::string& source = "<stream>");
ProfileMap load_profiles(const std::string& path);

/// Writes every profile (without entity descriptions) as JSON lines,
/// including field_enabled. Atomic replace of `path`.
void save_profiles(const ProfileMap& profiles, const std::string& path);

/// Entity descriptions file rows: user_id plus the description.
struct EntityRecord {
    std::string user_id;
    EntityDescription entity;
};

std::vector<EntityRecord> read_entity_records(std::istream& in, const std::string& source = "<stream>");
std::vector<EntityRecord> load_entity_records(const std::string& path);

/// Attaches every record to its user's profile. Records for users that are
/// not present are an error.
void attach_entity_records(ProfileMap& profiles, std::span<const EntityRecord> records);

}  // namespace pse
