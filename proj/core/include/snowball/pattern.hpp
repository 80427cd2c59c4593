#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace snowball {

enum class Interaction : std::uint8_t { Like, Retweet, Reply, Quote };

std::optional<Interaction> parse_interaction(std::string_view name);
std::string_view to_string(Interaction type);

/// Presence/absence of (like, retweet, reply, quote) for one (tweet, interactor)
/// pair. Printed most-significant first, so retweet+quote reads "0101".
/// The empty pattern cannot be constructed.
class InteractionPattern {
public:
    static constexpr unsigned kWidth = 4;
    static constexpr std::uint8_t kLike = 0b1000;
    static constexpr std::uint8_t kRetweet = 0b0100;
    static constexpr std::uint8_t kReply = 0b0010;
    static constexpr std::uint8_t kQuote = 0b0001;

    /// Throws DataError unless 1 <= bits <= 15.
    explicit InteractionPattern(unsigned bits);

    static std::optional<InteractionPattern> parse(std::string_view bits);

    std::uint8_t bits() const noexcept { return bits_; }
    bool has(Interaction type) const noexcept;
    std::string str() const;

    friend bool operator==(InteractionPattern, InteractionPattern) = default;
    friend auto operator<=>(InteractionPattern, InteractionPattern) = default;

private:
    std::uint8_t bits_;
};

/// Audience-facing pattern: (like, reply, retweet-or-quote).
class AFPattern {
public:
    static constexpr unsigned kWidth = 3;
    static constexpr std::uint8_t kLike = 0b100;
    static constexpr std::uint8_t kReply = 0b010;
    static constexpr std::uint8_t kAmplify = 0b001;

    explicit AFPattern(unsigned bits);

    std::uint8_t bits() const noexcept { return bits_; }
    std::string str() const;

    friend bool operator==(AFPattern, AFPattern) = default;

private:
    std::uint8_t bits_;
};

/// Collapse a set of engagement types into a pattern. Duplicates collapse;
/// an empty set throws DataError("no engagement").
InteractionPattern pattern_of(std::span<const Interaction> events);

AFPattern collapse_af(InteractionPattern p) noexcept;

/// One engagement carried by an edge. Unlabeled graphs use plain events,
/// which have no pattern.
struct Event {
    std::uint32_t tweet = 0;
    std::optional<InteractionPattern> pattern;

    static Event plain() { return {}; }
    friend bool operator==(const Event&, const Event&) = default;
};

enum class CountingScheme : std::uint8_t {
    Distinct,
    Nested,
    AudienceFacing,         ///< collapsed, nested subset rule
    AudienceFacingDistinct, ///< collapsed, exact-pattern rule
};

std::string_view to_string(CountingScheme scheme);
std::optional<CountingScheme> parse_scheme(std::string_view name);

/// Number of bits in the pattern space the scheme counts over (4 or 3).
unsigned pattern_width(CountingScheme scheme) noexcept;
/// Number of representable non-empty patterns (15 or 7).
inline unsigned pattern_count(CountingScheme scheme) noexcept {
    return (1u << pattern_width(scheme)) - 1;
}
bool is_nested(CountingScheme scheme) noexcept;

/// Pattern code of `p` in the scheme's space (identity or A-F collapse).
unsigned scheme_code(CountingScheme scheme, InteractionPattern p) noexcept;

/// Bit string of `code` in the scheme's width, e.g. "0101" or "011".
std::string pattern_label(CountingScheme scheme, unsigned code);
/// Inverse of pattern_label; nullopt for wrong width, bad digits or zero.
std::optional<unsigned> parse_pattern_label(CountingScheme scheme, std::string_view label);

} // namespace snowball
