#include "snowball/pattern.hpp"

#include "snowball/error.hpp"

#include <array>

namespace snowball {

namespace {

constexpr std::array<std::string_view, 4> kInteractionNames{"like", "retweet", "reply", "quote"};
constexpr std::array<std::uint8_t, 4> kInteractionBits{
    InteractionPattern::kLike, InteractionPattern::kRetweet, InteractionPattern::kReply,
    InteractionPattern::kQuote};

std::string bit_string(unsigned bits, unsigned width) {
    std::string out(width, '0');
    for (unsigned i = 0; i < width; ++i) {
        if (bits & (1u << (width - 1 - i))) out[i] = '1';
    }
    return out;
}

std::optional<unsigned> parse_bits(std::string_view s, unsigned width) {
    if (s.size() != width) return std::nullopt;
    unsigned bits = 0;
    for (char c : s) {
        if (c != '0' && c != '1') return std::nullopt;
        bits = (bits << 1) | static_cast<unsigned>(c == '1');
    }
    if (bits == 0) return std::nullopt;
    return bits;
}

} // namespace

std::optional<Interaction> parse_interaction(std::string_view name) {
    for (std::size_t i = 0; i < kInteractionNames.size(); ++i) {
        if (kInteractionNames[i] == name) return static_cast<Interaction>(i);
    }
    return std::nullopt;
}

std::string_view to_string(Interaction type) {
    return kInteractionNames[static_cast<std::size_t>(type)];
}

InteractionPattern::InteractionPattern(unsigned bits) : bits_(static_cast<std::uint8_t>(bits)) {
    if (bits == 0 || bits > 0b1111) {
        throw DataError("invalid interaction pattern " + std::to_string(bits));
    }
}

std::optional<InteractionPattern> InteractionPattern::parse(std::string_view bits) {
    if (auto v = parse_bits(bits, kWidth)) return InteractionPattern(*v);
    return std::nullopt;
}

bool InteractionPattern::has(Interaction type) const noexcept {
    return (bits_ & kInteractionBits[static_cast<std::size_t>(type)]) != 0;
}

std::string InteractionPattern::str() const { return bit_string(bits_, kWidth); }

AFPattern::AFPattern(unsigned bits) : bits_(static_cast<std::uint8_t>(bits)) {
    if (bits == 0 || bits > 0b111) {
        throw DataError("invalid audience-facing pattern " + std::to_string(bits));
    }
}

std::string AFPattern::str() const { return bit_string(bits_, kWidth); }

InteractionPattern pattern_of(std::span<const Interaction> events) {
    if (events.empty()) throw DataError("no engagement");
    unsigned bits = 0;
    for (auto e : events) bits |= kInteractionBits[static_cast<std::size_t>(e)];
    return InteractionPattern(bits);
}

AFPattern collapse_af(InteractionPattern p) noexcept {
    const unsigned b = p.bits();
    unsigned out = 0;
    if (b & InteractionPattern::kLike) out |= AFPattern::kLike;
    if (b & InteractionPattern::kReply) out |= AFPattern::kReply;
    if (b & (InteractionPattern::kRetweet | InteractionPattern::kQuote)) out |= AFPattern::kAmplify;
    return AFPattern(out);
}

std::string_view to_string(CountingScheme scheme) {
    switch (scheme) {
    case CountingScheme::Distinct: return "distinct";
    case CountingScheme::Nested: return "nested";
    case CountingScheme::AudienceFacing: return "audience-facing";
    case CountingScheme::AudienceFacingDistinct: return "audience-facing-distinct";
    }
    return "?";
}

std::optional<CountingScheme> parse_scheme(std::string_view name) {
    if (name == "distinct") return CountingScheme::Distinct;
    if (name == "nested") return CountingScheme::Nested;
    if (name == "audience-facing" || name == "af" || name == "a-f") {
        return CountingScheme::AudienceFacing;
    }
    if (name == "audience-facing-distinct" || name == "af-distinct") {
        return CountingScheme::AudienceFacingDistinct;
    }
    return std::nullopt;
}

unsigned pattern_width(CountingScheme scheme) noexcept {
    switch (scheme) {
    case CountingScheme::AudienceFacing:
    case CountingScheme::AudienceFacingDistinct: return AFPattern::kWidth;
    default: return InteractionPattern::kWidth;
    }
}

bool is_nested(CountingScheme scheme) noexcept {
    return scheme == CountingScheme::Nested || scheme == CountingScheme::AudienceFacing;
}

unsigned scheme_code(CountingScheme scheme, InteractionPattern p) noexcept {
    if (pattern_width(scheme) == AFPattern::kWidth) return collapse_af(p).bits();
    return p.bits();
}

std::string pattern_label(CountingScheme scheme, unsigned code) {
    return bit_string(code, pattern_width(scheme));
}

std::optional<unsigned> parse_pattern_label(CountingScheme scheme, std::string_view label) {
    return parse_bits(label, pattern_width(scheme));
}

} // namespace snowball
