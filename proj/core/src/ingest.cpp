#include "snowball/ingest.hpp"

#include "snowball/error.hpp"
#include "snowball/text.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <nlohmann/json.hpp>
#include <ostream>
#include <random>
#include <spdlog/spdlog.h>
#include <unordered_map>
#include <unordered_set>

namespace snowball {

namespace {

struct RawRow {
    std::string tweet_id;
    std::string author;
    std::string interactor;
    std::vector<std::string> types;
    std::optional<std::string> ts;
};

std::optional<InteractionPattern> types_pattern(const std::vector<std::string>& names) {
    unsigned bits = 0;
    for (const auto& name : names) {
        const auto t = parse_interaction(text::trim(name));
        if (!t) return std::nullopt;
        bits |= InteractionPattern::kLike >> static_cast<unsigned>(*t);
    }
    if (bits == 0) return std::nullopt;
    return InteractionPattern(bits);
}

std::optional<RawRow> parse_json_row(std::string_view line) {
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return std::nullopt;
    RawRow row;
    for (auto [key, dest] : {std::pair{"tweet_id", &row.tweet_id}, std::pair{"author", &row.author},
                             std::pair{"interactor", &row.interactor}}) {
        auto it = j.find(key);
        if (it == j.end()) return std::nullopt;
        if (it->is_string()) {
            *dest = it->get<std::string>();
        } else if (it->is_number_integer()) {
            *dest = it->dump();
        } else {
            return std::nullopt;
        }
    }
    auto types = j.find("types");
    if (types == j.end() || !types->is_array()) return std::nullopt;
    for (const auto& t : *types) {
        if (!t.is_string()) return std::nullopt;
        row.types.push_back(t.get<std::string>());
    }
    if (auto ts = j.find("ts"); ts != j.end() && !ts->is_null()) {
        row.ts = ts->is_string() ? ts->get<std::string>() : ts->dump();
    }
    return row;
}

std::optional<RawRow> parse_csv_row(std::string_view line, std::size_t columns) {
    auto fields = text::split_fields(line, ',');
    if (fields.size() != columns) return std::nullopt;
    RawRow row;
    row.tweet_id = std::string(text::trim(fields[0]));
    row.author = std::string(text::trim(fields[1]));
    row.interactor = std::string(text::trim(fields[2]));
    std::string types = fields[3];
    std::replace(types.begin(), types.end(), ',', '|');
    std::size_t start = 0;
    while (start <= types.size()) {
        const auto end = std::min(types.find('|', start), types.size());
        const auto name = text::trim(std::string_view(types).substr(start, end - start));
        if (!name.empty()) row.types.emplace_back(name);
        start = end + 1;
    }
    if (columns == 5 && !text::trim(fields[4]).empty()) {
        row.ts = std::string(text::trim(fields[4]));
    }
    return row;
}

} // namespace

std::optional<EventFormat> parse_event_format(std::string_view name) {
    if (name == "jsonl" || name == "json") return EventFormat::Jsonl;
    if (name == "csv") return EventFormat::Csv;
    return std::nullopt;
}

EventFormat event_format_for(std::string_view path) {
    auto ends_with = [&](std::string_view ext) { return path.ends_with(ext); };
    return ends_with(".jsonl") || ends_with(".json") ? EventFormat::Jsonl : EventFormat::Csv;
}

ParsedEvents parse_events(std::istream& in, EventFormat format, const ParseOptions& options) {
    ParsedEvents out;
    auto& report = out.report;
    std::string line;
    std::size_t columns = 0;
    if (format == EventFormat::Csv) {
        while (std::getline(in, line) && text::trim(line).empty()) {}
        const auto header = text::split_fields(line, ',');
        std::vector<std::string> names;
        for (const auto& h : header) names.emplace_back(text::trim(h));
        const std::vector<std::string> base{"tweet_id", "author", "interactor", "types"};
        auto with_ts = base;
        with_ts.emplace_back("ts");
        if (names == base) {
            columns = 4;
        } else if (names == with_ts) {
            columns = 5;
        } else if (!in && names.empty()) {
            return out;
        } else {
            throw DataError("events: expected CSV header 'tweet_id,author,interactor,types,ts'");
        }
    }

    std::map<std::pair<std::string, std::string>, std::size_t> index;
    std::unordered_map<std::string, std::string> author_of;
    std::size_t line_no = format == EventFormat::Csv ? 1 : 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        ++report.rows;
        auto row = format == EventFormat::Jsonl ? parse_json_row(line) : parse_csv_row(line, columns);
        std::optional<InteractionPattern> pattern;
        if (row) pattern = types_pattern(row->types);
        const bool ok = row && pattern && !row->tweet_id.empty() && !row->author.empty() &&
                        !row->interactor.empty();
        if (!ok) {
            ++report.malformed;
            spdlog::debug("events line {}: malformed row skipped", line_no);
            continue;
        }
        auto [known, fresh] = author_of.emplace(row->tweet_id, row->author);
        if (!fresh && known->second != row->author) {
            ++report.malformed;
            spdlog::debug("events line {}: tweet {} has conflicting authors", line_no, row->tweet_id);
            continue;
        }
        if (row->author == row->interactor) {
            ++report.self_engagements;
            continue;
        }
        auto key = std::pair{row->tweet_id, row->interactor};
        if (auto it = index.find(key); it != index.end()) {
            auto& ev = out.events[it->second];
            ev.types = InteractionPattern(ev.types.bits() | pattern->bits());
            if (!ev.ts) ev.ts = row->ts;
            ++report.merged;
            continue;
        }
        index.emplace(std::move(key), out.events.size());
        out.events.push_back({std::move(row->tweet_id), std::move(row->author),
                              std::move(row->interactor), *pattern, std::move(row->ts)});
    }
    if (report.malformed > 0 &&
        static_cast<double>(report.malformed) >
            options.max_malformed_fraction * static_cast<double>(report.rows)) {
        throw DataError("events: " + std::to_string(report.malformed) + " of " +
                        std::to_string(report.rows) + " rows malformed (cap " +
                        text::format_double(100.0 * options.max_malformed_fraction) + "%)");
    }
    if (report.malformed > 0) {
        spdlog::warn("events: skipped {} malformed rows of {}", report.malformed, report.rows);
    }
    return out;
}

ParsedEvents parse_events_file(const std::string& path, EventFormat format,
                               const ParseOptions& options) {
    auto in = text::open_input(path);
    return parse_events(in, format, options);
}

namespace {

std::vector<std::string> type_names(InteractionPattern p) {
    std::vector<std::string> names;
    for (auto t : {Interaction::Like, Interaction::Retweet, Interaction::Reply, Interaction::Quote}) {
        if (p.has(t)) names.emplace_back(to_string(t));
    }
    return names;
}

} // namespace

void write_events_jsonl(std::ostream& out, std::span<const EngagementEvent> events) {
    for (const auto& e : events) {
        nlohmann::ordered_json j;
        j["tweet_id"] = e.tweet_id;
        j["author"] = e.author;
        j["interactor"] = e.interactor;
        j["types"] = type_names(e.types);
        if (e.ts) j["ts"] = *e.ts;
        out << j.dump() << '\n';
    }
}

void write_events_csv(std::ostream& out, std::span<const EngagementEvent> events) {
    out << "tweet_id,author,interactor,types,ts\n";
    for (const auto& e : events) {
        std::string types;
        for (const auto& n : type_names(e.types)) {
            if (!types.empty()) types += '|';
            types += n;
        }
        out << e.tweet_id << ',' << e.author << ',' << e.interactor << ',' << types << ','
            << e.ts.value_or("") << '\n';
    }
}

// ---------------------------------------------------------------------------

void CorpusFilter::validate() const {
    if (!(trim_quantile > 0.0 && trim_quantile <= 1.0)) {
        throw ConfigError("trim_quantile: must be in (0, 1], got " +
                          text::format_double(trim_quantile));
    }
}

FilteredCorpus apply_filters(std::span<const EngagementEvent> events,
                             std::span<const std::string> seeds, const CorpusFilter& filter) {
    filter.validate();
    FilteredCorpus out;
    auto& report = out.report;
    report.seeds_in = seeds.size();
    report.events_in = events.size();

    std::unordered_set<std::string_view> authors;
    std::unordered_map<std::string_view, std::unordered_set<std::string_view>> interactors;
    std::vector<std::string_view> tweet_order;
    for (const auto& e : events) {
        authors.insert(e.author);
        auto [it, fresh] = interactors.try_emplace(e.tweet_id);
        if (fresh) tweet_order.push_back(e.tweet_id);
        it->second.insert(e.interactor);
    }
    for (const auto& s : seeds) {
        if (!filter.require_author_activity || authors.contains(s)) {
            out.seeds.push_back(s);
        } else {
            ++report.seeds_removed;
        }
    }

    report.tweets_in = tweet_order.size();
    if (tweet_order.empty()) throw DataError("apply_filters: no tweets in corpus");
    std::vector<std::size_t> sizes;
    sizes.reserve(tweet_order.size());
    for (auto t : tweet_order) sizes.push_back(interactors[t].size());
    std::sort(sizes.begin(), sizes.end(), std::greater<>());
    const auto n = static_cast<double>(sizes.size());
    const auto to_remove = static_cast<std::size_t>(std::floor(n * (1.0 - filter.trim_quantile) + 1e-9));
    if (to_remove >= sizes.size()) throw DataError("apply_filters: every tweet trimmed");

    std::unordered_set<std::string_view> dropped;
    if (to_remove > 0) {
        const std::size_t keep_level = sizes[to_remove];
        for (auto t : tweet_order) {
            if (interactors[t].size() > keep_level) dropped.insert(t);
        }
    }
    report.tweets_removed = dropped.size();
    for (const auto& e : events) {
        if (dropped.contains(e.tweet_id)) {
            ++report.events_removed;
        } else {
            out.events.push_back(e);
        }
    }
    return out;
}

Corpus build_corpus(std::span<const EngagementEvent> events) {
    Corpus corpus;
    std::unordered_map<std::string_view, std::uint32_t> tweet_index;
    corpus.engagements.reserve(events.size());
    corpus.directed.reserve(events.size());
    for (const auto& e : events) {
        if (e.author == e.interactor) continue;
        const NodeId author = corpus.ids.intern(e.author);
        const NodeId interactor = corpus.ids.intern(e.interactor);
        auto [it, fresh] =
            tweet_index.try_emplace(e.tweet_id, static_cast<std::uint32_t>(tweet_index.size()));
        corpus.engagements.push_back({author, interactor, e.types});
        corpus.directed.push_back({interactor, author, Event{it->second, e.types}});
    }
    corpus.tweets = tweet_index.size();
    return corpus;
}

std::shared_ptr<IndexedBackend> event_backend(const Corpus& corpus, std::string description) {
    return std::make_shared<IndexedBackend>(corpus.ids, corpus.directed, std::move(description));
}

std::vector<EngagementEvent> synthesize_corpus(const FixtureSpec& spec) {
    if (spec.users < 2) throw ConfigError("synthesize_corpus: need at least 2 users");
    if (spec.max_engagements_per_tweet == 0) {
        throw ConfigError("synthesize_corpus: max_engagements_per_tweet must be positive");
    }
    std::mt19937_64 rng(spec.rng_seed);
    if (spec.users < 2) throw ConfigError("synthesize_corpus: need at least two users");
    std::uniform_int_distribution<std::size_t> user(0, spec.users - 1);
    std::uniform_int_distribution<std::size_t> other(0, spec.users - 2);
    std::uniform_int_distribution<std::size_t> count(1, spec.max_engagements_per_tweet);
    std::bernoulli_distribution self(spec.self_engagement_rate);
    // likes dominate; the other forms are rarer, mirroring real engagement mixes
    std::bernoulli_distribution like(0.8), retweet(0.2), reply(0.1), quote(0.05);

    std::vector<EngagementEvent> out;
    for (std::size_t t = 0; t < spec.tweets; ++t) {
        const auto author = user(rng);
        const auto k = count(rng);
        std::unordered_set<std::size_t> used;
        for (std::size_t e = 0; e < k; ++e) {
            std::size_t who = author;
            if (!self(rng)) {
                who = other(rng);
                if (who >= author) ++who;
            }
            if (who != author && !used.insert(who).second) continue;
            unsigned bits = (like(rng) ? InteractionPattern::kLike : 0u) |
                            (retweet(rng) ? InteractionPattern::kRetweet : 0u) |
                            (reply(rng) ? InteractionPattern::kReply : 0u) |
                            (quote(rng) ? InteractionPattern::kQuote : 0u);
            if (bits == 0) bits = InteractionPattern::kLike;
            out.push_back({"t" + std::to_string(t), "u" + std::to_string(author),
                           "u" + std::to_string(who), InteractionPattern(bits),
                           std::to_string(1'600'000'000 + t * 60 + e)});
        }
    }
    return out;
}

} // namespace snowball
