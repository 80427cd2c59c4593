#pragma once

// Engagement logs: parsing, seed/outlier filtering, and conversion into the
// calibration corpus and an event-backed oracle.

#include "snowball/ids.hpp"
#include "snowball/interaction.hpp"
#include "snowball/oracle.hpp"
#include "snowball/pattern.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace snowball {

struct EngagementEvent {
    std::string tweet_id;
    std::string author;
    std::string interactor;
    InteractionPattern types; ///< deduplicated engagement forms
    std::optional<std::string> ts;

    friend bool operator==(const EngagementEvent&, const EngagementEvent&) = default;
};

enum class EventFormat : std::uint8_t { Jsonl, Csv };

std::optional<EventFormat> parse_event_format(std::string_view name);
/// By extension: .jsonl / .json -> Jsonl, anything else -> Csv.
EventFormat event_format_for(std::string_view path);

struct ParseOptions {
    double max_malformed_fraction = 0.01;
};

struct ParseReport {
    std::size_t rows = 0;
    std::size_t malformed = 0;
    std::size_t self_engagements = 0;
    std::size_t merged = 0; ///< rows folded into an earlier (tweet, interactor)
};

struct ParsedEvents {
    std::vector<EngagementEvent> events; ///< first-appearance order
    ParseReport report;
};

/// JSONL: {"tweet_id", "author", "interactor", "types": [...], "ts"?}.
/// CSV: header `tweet_id,author,interactor,types[,ts]`, types joined by '|'.
/// Rows are merged per (tweet, interactor); self-engagement is dropped.
/// Malformed rows are skipped; DataError if they exceed the allowed fraction.
ParsedEvents parse_events(std::istream& in, EventFormat format, const ParseOptions& options = {});
ParsedEvents parse_events_file(const std::string& path, EventFormat format,
                               const ParseOptions& options = {});

void write_events_jsonl(std::ostream& out, std::span<const EngagementEvent> events);
void write_events_csv(std::ostream& out, std::span<const EngagementEvent> events);

struct CorpusFilter {
    bool require_author_activity = true;
    double trim_quantile = 1.0; ///< keep tweets in this lower fraction

    void validate() const;
};

struct FilterReport {
    std::size_t seeds_in = 0;
    std::size_t seeds_removed = 0;
    std::size_t tweets_in = 0;
    std::size_t tweets_removed = 0;
    std::size_t events_in = 0;
    std::size_t events_removed = 0;
};

struct FilteredCorpus {
    std::vector<EngagementEvent> events;
    std::vector<std::string> seeds;
    FilterReport report;
};

/// Drops seeds that authored nothing (if required), then ranks tweets by
/// distinct interactors and removes the top floor(n (1 - q)) of them; tweets
/// tied with the first kept one are kept. Throws DataError if every tweet
/// would be removed.
FilteredCorpus apply_filters(std::span<const EngagementEvent> events,
                             std::span<const std::string> seeds, const CorpusFilter& filter);

/// Interned corpus: authors and interactors share one id table.
struct Corpus {
    IdTable ids;
    std::vector<Engagement> engagements;
    std::vector<DirectedEvent> directed; ///< interactor -> author, one per engagement
    std::size_t tweets = 0;
};

Corpus build_corpus(std::span<const EngagementEvent> events);

/// Oracle store whose in-neighbors of v are the users who engaged with v's tweets.
std::shared_ptr<IndexedBackend> event_backend(const Corpus& corpus, std::string description);

struct FixtureSpec {
    std::size_t users = 50;
    std::size_t tweets = 100;
    std::size_t max_engagements_per_tweet = 8;
    double self_engagement_rate = 0.0;
    std::uint64_t rng_seed = 1;
};

/// Random engagement log for tests and demos; types drawn so every pattern
/// can occur, likes most often.
std::vector<EngagementEvent> synthesize_corpus(const FixtureSpec& spec);

} // namespace snowball
