#include "cli.hpp"

#include "snowball/error.hpp"
#include "snowball/graph.hpp"
#include "snowball/ingest.hpp"
#include "snowball/interaction.hpp"
#include "snowball/metrics.hpp"
#include "snowball/oracle.hpp"
#include "snowball/sampler.hpp"
#include "snowball/sbm.hpp"
#include "snowball/text.hpp"
#include "snowball/weighting.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

namespace snowball::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Globals {
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string out = "out";
    std::string format = "csv";
};

std::string fnv1a(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return fmt::format("{:016x}", h);
}

std::string slurp(const std::string& path) {
    auto in = text::open_input(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    auto out = text::open_output(path.string());
    out << content;
    if (!out) throw IoError("write failure: " + path.string());
}

fs::path ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
    return dir;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    for (const auto& f : text::split_fields(s, ',')) {
        auto t = text::trim(f);
        if (!t.empty()) out.emplace_back(t);
    }
    return out;
}

std::vector<std::string> read_id_list(const std::string& path) {
    auto in = text::open_input(path);
    std::vector<std::string> ids;
    std::string line;
    while (std::getline(in, line)) {
        auto t = text::trim(line);
        if (t.empty() || t.front() == '#') continue;
        for (auto& id : split_list(std::string(t))) ids.push_back(std::move(id));
    }
    return ids;
}

std::string r_tag(double r) { return fmt::format("r{:g}", r); }

// --- calibrate --------------------------------------------------------------

struct CalibrateArgs {
    std::string events;
    std::string events_format = "auto";
    std::string scheme = "audience-facing";
    std::string seeds_file;
    double trim = 1.0;
    bool require_author_activity = false;
    double max_malformed = 0.01;
};

EventFormat resolve_format(const std::string& name, const std::string& path) {
    if (name == "auto") return event_format_for(path);
    auto f = parse_event_format(name);
    if (!f) throw ConfigError("--events-format: unknown format '" + name + "'");
    return *f;
}

int cmd_calibrate(const Globals& g, const CalibrateArgs& a, std::ostream& out) {
    const auto scheme = parse_scheme(a.scheme);
    if (!scheme) throw ConfigError("--scheme: unknown counting scheme '" + a.scheme + "'");
    CorpusFilter filter{a.require_author_activity, a.trim};
    filter.validate();

    ParseOptions popts;
    popts.max_malformed_fraction = a.max_malformed;
    auto parsed = parse_events_file(a.events, resolve_format(a.events_format, a.events), popts);
    if (parsed.events.empty()) throw ConfigError("empty corpus");

    std::vector<std::string> seeds;
    if (!a.seeds_file.empty()) seeds = read_id_list(a.seeds_file);
    auto filtered = apply_filters(parsed.events, seeds, filter);
    const auto corpus = build_corpus(filtered.events);
    const auto cal = calibrate(count_events(corpus.engagements, *scheme));

    const fs::path dir = ensure_dir(g.out);
    if (g.format == "json") {
        json rows = json::array();
        for (const auto& [code, eta] : cal.balanced.values) {
            rows.push_back({{"pattern", pattern_label(*scheme, code)},
                            {"eta_global", cal.global.at(code)},
                            {"eta_source", cal.source.at(code)},
                            {"eta_target", cal.target.at(code)},
                            {"eta_star", eta},
                            {"omega", cal.weights.omega.at(code)},
                            {"omega_star", cal.weights.omega_star.at(code)}});
        }
        json doc{{"scheme", std::string(to_string(*scheme))},
                 {"events", corpus.engagements.size()},
                 {"rows", rows}};
        write_file(dir / "calibration.json", doc.dump(2) + "\n");
    } else {
        std::ostringstream csv;
        write_calibration_csv(csv, cal);
        write_file(dir / "calibration.csv", csv.str());
    }

    out << fmt::format("scheme {}  events {}  tweets {}  malformed {}  self {}\n",
                       to_string(*scheme), corpus.engagements.size(), corpus.tweets,
                       parsed.report.malformed, parsed.report.self_engagements);
    if (!seeds.empty() || filter.trim_quantile < 1.0) {
        out << fmt::format("filter: seeds {} -> {}  tweets {} -> {}\n", filtered.report.seeds_in,
                           filtered.seeds.size(), filtered.report.tweets_in,
                           filtered.report.tweets_in - filtered.report.tweets_removed);
    }
    out << fmt::format("{:>8} {:>10} {:>8}\n", "pattern", "eta_star", "omega*");
    for (const auto& [code, eta] : cal.balanced.values) {
        out << fmt::format("{:>8} {:>10.4f} {:>8.2f}\n", pattern_label(*scheme, code), eta,
                           cal.weights.omega_star.at(code));
    }
    return 0;
}

// --- gen-sbm ----------------------------------------------------------------

struct GenArgs {
    std::string config;
    std::string block_sizes;
    std::uint32_t blocks = 8;
    std::uint32_t block_size = 200;
    double k = 10.0;
    double r = 4.0;
    std::string seeds; ///< empty: one seed per block
    std::string selection = "uniform";
    bool k_given = false, r_given = false, seeds_given = false;
};

sbm::ConfigFile resolve_sbm(const Globals& g, const GenArgs& a) {
    sbm::ConfigFile cfg;
    if (!a.config.empty()) {
        cfg = sbm::read_config_file(a.config);
        if (!a.block_sizes.empty()) {
            throw ConfigError("--block-sizes: cannot be combined with --config");
        }
    } else {
        if (!a.block_sizes.empty()) {
            for (const auto& f : split_list(a.block_sizes)) {
                auto v = text::parse_int(f);
                if (!v || *v <= 0) throw ConfigError("--block-sizes: bad entry '" + f + "'");
                cfg.model.block_sizes.push_back(static_cast<std::uint32_t>(*v));
            }
        } else {
            cfg.model.block_sizes.assign(a.blocks, a.block_size);
        }
        cfg.model.k_intra = a.k;
        cfg.model.r = a.r;
    }
    if (a.config.empty() || a.k_given) cfg.model.k_intra = a.k;
    if (a.config.empty() || a.r_given) cfg.model.r = a.r;
    if (a.config.empty() || g.seed_given) cfg.model.rng_seed = g.seed;
    if (a.config.empty() || a.seeds_given) {
        sbm::SeedConfig sc;
        const auto b = cfg.model.block_sizes.size();
        sc.per_block_counts = sbm::parse_seed_counts(a.seeds.empty() ? fmt::format("[1]*{}", b) : a.seeds, b);
        sc.selection = sbm::parse_selection(a.selection);
        sc.rng_seed = cfg.model.rng_seed;
        cfg.seeds = sc;
    } else if (cfg.seeds && g.seed_given) {
        cfg.seeds->rng_seed = g.seed;
    }
    cfg.model.validate();
    return cfg;
}

struct GeneratedGraph {
    sbm::ConfigFile config;
    sbm::BlockMatrix matrix;
    sbm::Graph graph;
    std::vector<std::uint32_t> seeds;
};

GeneratedGraph generate_graph(const sbm::ConfigFile& cfg) {
    GeneratedGraph out{cfg, sbm::derive_block_matrix(cfg.model), {}, {}};
    out.graph = sbm::generate(out.matrix, cfg.model.block_sizes, cfg.model.rng_seed);
    if (cfg.seeds) out.seeds = sbm::select_seeds(out.graph.labels, *cfg.seeds, out.graph.degrees());
    return out;
}

void write_generated(const fs::path& dir, const GeneratedGraph& gen) {
    ensure_dir(dir);
    {
        std::ostringstream s;
        sbm::write_edge_list(s, gen.graph);
        write_file(dir / "edges.tsv", s.str());
    }
    {
        std::ostringstream s;
        sbm::write_labels(s, gen.graph);
        write_file(dir / "labels.csv", s.str());
    }
    if (!gen.seeds.empty()) {
        std::ostringstream s;
        for (auto v : gen.seeds) s << v << '\n';
        write_file(dir / "seeds.txt", s.str());
    }
    json doc{{"block_sizes", gen.config.model.block_sizes},
             {"k_intra", gen.config.model.k_intra},
             {"r", gen.config.model.r},
             {"rng_seed", gen.config.model.rng_seed},
             {"rho", gen.matrix.rho},
             {"n", gen.graph.n},
             {"m", gen.graph.edges.size()},
             {"seeds", gen.seeds}};
    write_file(dir / "sbm.json", doc.dump(2) + "\n");
}

int cmd_gen_sbm(const Globals& g, const GenArgs& a, std::ostream& out) {
    const auto gen = generate_graph(resolve_sbm(g, a));
    write_generated(g.out, gen);
    out << fmt::format("nodes {}  edges {}  blocks {}  seeds {}  rng_seed {}\n", gen.graph.n,
                       gen.graph.edges.size(), gen.matrix.blocks(), gen.seeds.size(),
                       gen.config.model.rng_seed);
    return 0;
}

// --- sample -----------------------------------------------------------------

struct SampleRequest {
    std::string graph;
    bool directed = false;
    std::string events;
    std::string events_format = "auto";
    std::vector<std::string> seeds;
    std::string strategy = "MAS";
    std::string weights;
    double scale = 1.0;
    std::optional<std::size_t> steps;
    std::optional<std::size_t> insiders;
    std::string tie_break = "discovery";
    std::uint64_t rng_seed = 0;
    std::string labels;
};

struct SampleArgs {
    SampleRequest req;
    std::string seeds_list;
    std::string seeds_file;
    std::string manifest;
    std::size_t steps = 0;
    std::size_t insiders = 0;
};

std::shared_ptr<const OracleBackend> load_backend(const SampleRequest& r) {
    if (!r.graph.empty() && !r.events.empty()) {
        throw ConfigError("sample: give either --graph or --events, not both");
    }
    if (!r.graph.empty()) return IndexedBackend::load_edge_list(r.graph, !r.directed);
    if (!r.events.empty()) {
        auto parsed = parse_events_file(r.events, resolve_format(r.events_format, r.events));
        if (parsed.events.empty()) throw DataError("events: empty corpus");
        return event_backend(build_corpus(parsed.events), "events:" + r.events);
    }
    throw ConfigError("sample: one of --graph or --events is required");
}

EdgeWeighting load_weighting(const SampleRequest& r, std::string& weights_id) {
    EdgeWeighting w;
    weights_id = "unit";
    if (!r.weights.empty()) {
        const auto content = slurp(r.weights);
        std::istringstream in(content);
        auto cal = read_calibration_csv(in);
        weights_id = fmt::format("{}:fnv1a:{}", to_string(cal.weights.scheme), fnv1a(content));
        w = EdgeWeighting::from_table(std::move(cal.weights), weights_id);
    }
    return r.scale == 1.0 ? w : w.scaled(r.scale);
}

json request_json(const SampleRequest& r, const std::string& descriptor,
                  const std::string& weights_id) {
    json oracle;
    if (!r.graph.empty()) {
        oracle = {{"kind", "edge-list"}, {"path", r.graph}, {"directed", r.directed}};
    } else {
        oracle = {{"kind", "events"}, {"path", r.events}, {"format", r.events_format}};
    }
    oracle["descriptor"] = descriptor;
    json budget{{"steps", nullptr}, {"insiders", nullptr}};
    if (r.steps) budget["steps"] = *r.steps;
    if (r.insiders) budget["insiders"] = *r.insiders;
    return json{{"command", "sample"},
                {"version", kVersion},
                {"strategy", r.strategy},
                {"tie_break", r.tie_break},
                {"rng_seed", r.rng_seed},
                {"oracle", oracle},
                {"weights", {{"id", weights_id}, {"path", r.weights}, {"scale", r.scale}}},
                {"seeds", r.seeds},
                {"budget", budget},
                {"labels", r.labels.empty() ? json(nullptr) : json(r.labels)}};
}

SampleRequest request_from_manifest(const std::string& path) {
    json m;
    try {
        m = json::parse(slurp(path));
        SampleRequest r;
        const auto& o = m.at("oracle");
        if (o.at("kind") == "edge-list") {
            r.graph = o.at("path").get<std::string>();
            r.directed = o.at("directed").get<bool>();
        } else {
            r.events = o.at("path").get<std::string>();
            r.events_format = o.at("format").get<std::string>();
        }
        r.strategy = m.at("strategy").get<std::string>();
        r.tie_break = m.at("tie_break").get<std::string>();
        r.rng_seed = m.at("rng_seed").get<std::uint64_t>();
        r.weights = m.at("weights").at("path").get<std::string>();
        r.scale = m.at("weights").at("scale").get<double>();
        r.seeds = m.at("seeds").get<std::vector<std::string>>();
        const auto& b = m.at("budget");
        if (!b.at("steps").is_null()) r.steps = b.at("steps").get<std::size_t>();
        if (!b.at("insiders").is_null()) r.insiders = b.at("insiders").get<std::size_t>();
        if (!m.at("labels").is_null()) r.labels = m.at("labels").get<std::string>();
        return r;
    } catch (const json::exception& e) {
        throw ConfigError("manifest " + path + ": " + e.what());
    }
}

struct SampleResult {
    SampleTrace trace;
    IdTable ids;
    std::optional<CommunityLabels> labels;
    DiscoveredGraph graph;
};

/// Runs one sample and writes trace.csv, manifest.json, insiders.tsv,
/// access_log.csv (and evolution.csv with labels) into `dir`.
SampleResult execute_sample(const SampleRequest& r, const fs::path& dir,
                            std::shared_ptr<const OracleBackend> backend = nullptr) {
    const auto strategy = parse_strategy(r.strategy);
    if (!strategy) throw ConfigError("--strategy: unknown strategy '" + r.strategy + "'");
    SamplerOptions opts;
    opts.rng_seed = r.rng_seed;
    if (r.tie_break == "random") {
        opts.tie_break = TieBreak::Random;
    } else if (r.tie_break != "discovery") {
        throw ConfigError("--tie-break: expected 'discovery' or 'random'");
    }
    if (r.seeds.empty()) throw ConfigError("--seeds: at least one seed is required");
    if ((r.steps && *r.steps == 0) || (r.insiders && *r.insiders == 0)) {
        throw ConfigError("budget: must be positive");
    }
    if (!(r.scale > 0)) throw ConfigError("--scale: must be positive");

    if (!backend) backend = load_backend(r);
    std::string weights_id;
    auto weighting = load_weighting(r, weights_id);

    GraphOracle oracle(backend);
    std::vector<NodeId> seeds;
    for (const auto& s : r.seeds) {
        auto id = oracle.resolve(s);
        if (!id) throw NodeNotDiscoverable(s);
        seeds.push_back(*id);
    }
    TightSampler sampler(oracle, seeds, weighting, opts);
    sampler.run(*strategy, Budget{r.steps, r.insiders});

    SampleResult result{sampler.trace(), oracle.ids(), std::nullopt, sampler.graph()};
    ensure_dir(dir);
    {
        std::ostringstream s;
        write_trace_csv(s, result.trace, oracle.ids());
        write_file(dir / "trace.csv", s.str());
    }
    {
        std::ostringstream s;
        write_edge_list(s, induced_insider_subgraph(sampler.graph()), oracle.ids());
        write_file(dir / "insiders.tsv", s.str());
    }
    {
        std::ostringstream s;
        oracle.write_access_log(s);
        write_file(dir / "access_log.csv", s.str());
    }
    if (!r.labels.empty()) {
        auto in = text::open_input(r.labels);
        result.labels = read_labels_csv(in, result.ids);
        std::ostringstream s;
        write_evolution_csv(s, community_evolution(result.trace, *result.labels));
        write_file(dir / "evolution.csv", s.str());
    }
    auto manifest = request_json(r, oracle.describe(), weights_id);
    const auto trace_text = slurp((dir / "trace.csv").string());
    manifest["result"] = {{"steps", result.trace.steps.size()},
                          {"insiders", result.trace.final_insiders()},
                          {"stop_reason", std::string(to_string(result.trace.reason))},
                          {"initial_boundary", result.trace.initial_boundary},
                          {"final_boundary", sampler.boundary()},
                          {"trace_fnv1a", fnv1a(trace_text)}};
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    return result;
}

int cmd_sample(const Globals& g, SampleArgs a, std::ostream& out) {
    SampleRequest r;
    if (!a.manifest.empty()) {
        r = request_from_manifest(a.manifest);
    } else {
        r = a.req;
        r.rng_seed = g.seed;
        r.seeds = split_list(a.seeds_list);
        if (!a.seeds_file.empty()) {
            for (auto& s : read_id_list(a.seeds_file)) r.seeds.push_back(std::move(s));
        }
        if (a.steps > 0) r.steps = a.steps;
        if (a.insiders > 0) r.insiders = a.insiders;
    }
    const auto res = execute_sample(r, g.out);
    out << fmt::format("{}: {} steps, {} insiders, {} ({})\n", r.strategy, res.trace.steps.size(),
                       res.trace.final_insiders(), to_string(res.trace.reason),
                       (fs::path(g.out) / "trace.csv").string());
    return 0;
}

// --- metrics ----------------------------------------------------------------

struct LoadedRun {
    std::string name;
    IdTable ids;
    SampleTrace trace;
    SampledNetwork network;
};

LoadedRun load_run(const fs::path& dir) {
    LoadedRun run;
    run.name = dir.filename().string();
    if (run.name.empty()) run.name = dir.parent_path().filename().string();
    json m;
    try {
        m = json::parse(slurp((dir / "manifest.json").string()));
        for (const auto& s : m.at("seeds")) run.trace.seeds.push_back(run.ids.intern(s.get<std::string>()));
        run.trace.initial_boundary = m.at("result").at("initial_boundary").get<double>();
    } catch (const json::exception& e) {
        throw DataError("run " + dir.string() + ": bad manifest: " + e.what());
    }
    {
        auto in = text::open_input((dir / "trace.csv").string());
        std::string line;
        std::getline(in, line);
        std::size_t line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            if (text::trim(line).empty()) continue;
            const auto f = text::split_fields(line, ',');
            auto t = f.size() == 6 ? text::parse_int(f[0]) : std::nullopt;
            auto p = f.size() == 6 ? text::parse_double(f[2]) : std::nullopt;
            auto b = f.size() == 6 ? text::parse_double(f[3]) : std::nullopt;
            if (!t || !p || !b) throw DataError(fmt::format("{}/trace.csv:{}: bad row", dir.string(), line_no));
            TraceStep s;
            s.timestep = static_cast<std::size_t>(*t);
            s.node = run.ids.intern(f[1]);
            s.priority = *p;
            s.boundary = *b;
            run.trace.steps.push_back(s);
        }
    }
    run.network.insiders = run.trace.inclusion_order();
    {
        auto in = text::open_input((dir / "insiders.tsv").string());
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (text::trim(line).empty()) continue;
            const auto f = text::split_fields(line, '\t');
            auto w = f.size() == 4 ? text::parse_double(f[2]) : std::nullopt;
            auto n = f.size() == 4 ? text::parse_int(f[3]) : std::nullopt;
            if (!w || !n) throw DataError(fmt::format("{}/insiders.tsv:{}: bad row", dir.string(), line_no));
            run.network.edges.push_back(
                {run.ids.intern(f[0]), run.ids.intern(f[1]), *w, static_cast<std::size_t>(*n)});
        }
    }
    return run;
}

struct MetricsArgs {
    std::vector<std::string> runs;
    std::string labels;
    bool no_min_common = false;
    std::size_t window = 10;
    double z = 3.0;
};

json report_json(const std::string& name, const MetricsReport& r) {
    auto j = json::parse(metrics_json(r));
    json out{{"run", name}};
    out.update(j);
    return out;
}

int cmd_metrics(const Globals& g, const MetricsArgs& a, std::ostream& out) {
    if (a.runs.empty()) throw ConfigError("--run: at least one run directory is required");
    std::vector<LoadedRun> runs;
    for (const auto& d : a.runs) runs.push_back(load_run(d));

    std::vector<SampledNetwork> nets;
    for (const auto& r : runs) nets.push_back(r.network);
    const bool common = !a.no_min_common && nets.size() > 1;
    if (common) nets = min_common_snapshot(nets);

    const fs::path dir = ensure_dir(g.out);
    std::vector<MetricsReport> reports;
    for (const auto& n : nets) reports.push_back(evaluate(n));

    json inflections = json::object();
    if (!a.labels.empty()) {
        for (auto& r : runs) {
            auto in = text::open_input(a.labels);
            const auto labels = read_labels_csv(in, r.ids);
            const auto series = community_evolution(r.trace, labels);
            std::ostringstream s;
            write_evolution_csv(s, series);
            write_file(dir / (r.name + ".evolution.csv"), s.str());
            inflections[r.name] = inflection_candidates(series, a.window, a.z);
        }
    }

    if (g.format == "json") {
        json doc{{"min_common_size", common ? json(nets.front().insiders.size()) : json(nullptr)}};
        json rows = json::array();
        for (std::size_t i = 0; i < runs.size(); ++i) rows.push_back(report_json(runs[i].name, reports[i]));
        doc["runs"] = rows;
        if (!inflections.empty()) doc["inflections"] = inflections;
        write_file(dir / "metrics.json", doc.dump(2) + "\n");
    } else {
        std::ostringstream s;
        s << "run,n,m,cc_local,cc_global,avg_shortest_path,reachable_fraction,avg_degree,"
             "avg_weighted_degree\n";
        for (std::size_t i = 0; i < runs.size(); ++i) {
            const auto& r = reports[i];
            s << runs[i].name << ',' << r.n << ',' << r.m << ',' << text::format_double(r.cc_local)
              << ',' << text::format_double(r.cc_global) << ','
              << (std::isnan(r.avg_shortest_path) ? std::string() : text::format_double(r.avg_shortest_path))
              << ',' << text::format_double(r.reachable_fraction) << ','
              << text::format_double(r.avg_degree) << ','
              << text::format_double(r.avg_weighted_degree) << '\n';
        }
        write_file(dir / "metrics.csv", s.str());
    }

    if (common) out << fmt::format("min-common size: {}\n", nets.front().insiders.size());
    out << fmt::format("{:<24} {:>6} {:>7} {:>9} {:>9} {:>7} {:>7}\n", "run", "n", "m", "CC_local",
                       "CC_global", "<L>", "<k>");
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto& r = reports[i];
        out << fmt::format("{:<24} {:>6} {:>7} {:>9.4f} {:>9.4f} {:>7.3f} {:>7.3f}\n", runs[i].name,
                           r.n, r.m, r.cc_local, r.cc_global, r.avg_shortest_path, r.avg_degree);
    }
    return 0;
}

// --- sweep ------------------------------------------------------------------

struct SweepArgs {
    GenArgs gen;
    std::string r_list;
    std::string strategies;
    std::size_t repeats = 1;
    std::size_t steps = 0;
    std::size_t window = 0;
};

std::size_t worker_count(std::size_t cells) {
    std::size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SNOWBALL_WORKERS")) {
        auto v = text::parse_int(env);
        if (!v || *v <= 0) throw ConfigError("SNOWBALL_WORKERS: expected a positive integer");
        n = static_cast<std::size_t>(*v);
    }
    return std::max<std::size_t>(1, std::min(n, cells));
}

int cmd_sweep(const Globals& g, const SweepArgs& a, std::ostream& out) {
    const auto base = resolve_sbm(g, a.gen);
    if (!base.seeds) throw ConfigError("sweep: seed configuration required");
    const auto b = base.model.block_sizes.size();

    std::vector<double> rs;
    if (a.r_list.empty()) {
        rs = sbm::default_r_sweep(b);
    } else {
        for (const auto& f : split_list(a.r_list)) {
            auto v = text::parse_double(f);
            if (!v || !(*v > 0)) throw ConfigError("--r: bad value '" + f + "'");
            rs.push_back(*v);
        }
    }
    std::vector<std::string> strategies;
    if (a.strategies.empty()) {
        for (auto s : kAllStrategies) strategies.emplace_back(to_string(s));
    } else {
        for (auto& s : split_list(a.strategies)) {
            if (!parse_strategy(s)) throw ConfigError("--strategies: unknown strategy '" + s + "'");
            strategies.push_back(std::move(s));
        }
    }
    if (a.repeats == 0) throw ConfigError("--repeats: must be positive");
    const auto min_block = *std::min_element(base.model.block_sizes.begin(), base.model.block_sizes.end());
    const std::size_t window = a.window > 0 ? a.window : std::max<std::size_t>(2, min_block * 9 / 10);

    const fs::path root = ensure_dir(g.out);

    // graphs first, so every cell can be replayed from files on disk
    struct GraphCell {
        double r;
        std::size_t rep;
        fs::path dir;
        std::shared_ptr<const OracleBackend> backend;
        std::vector<std::string> seeds;
        std::uint64_t seed;
    };
    std::vector<GraphCell> graphs;
    for (double r : rs) {
        for (std::size_t rep = 0; rep < a.repeats; ++rep) {
            auto cfg = base;
            cfg.model.r = r;
            cfg.model.rng_seed = base.model.rng_seed + rep;
            cfg.seeds->rng_seed = cfg.model.rng_seed;
            const auto gen = generate_graph(cfg);
            const auto dir = root / "graphs" / fmt::format("{}_rep{}", r_tag(r), rep);
            write_generated(dir, gen);
            GraphCell cell{r, rep, dir, IndexedBackend::load_edge_list((dir / "edges.tsv").string(), true), {},
                           cfg.model.rng_seed};
            for (auto v : gen.seeds) cell.seeds.push_back(std::to_string(v));
            graphs.push_back(std::move(cell));
        }
    }

    struct Cell {
        const GraphCell* graph;
        std::string strategy;
        fs::path dir;
        SampleRequest req;
        std::string row;
    };
    std::vector<Cell> cells;
    for (const auto& gc : graphs) {
        for (const auto& s : strategies) {
            Cell c{&gc, s, root / "runs" / fmt::format("{}_{}_rep{}", r_tag(gc.r), s, gc.rep), {}, {}};
            c.req.graph = (gc.dir / "edges.tsv").string();
            c.req.seeds = gc.seeds;
            c.req.strategy = s;
            c.req.rng_seed = gc.seed;
            c.req.labels = (gc.dir / "labels.csv").string();
            if (a.steps > 0) c.req.steps = a.steps;
            cells.push_back(std::move(c));
        }
    }

    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> failures(cells.size());
    auto work = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < cells.size();) {
            auto& c = cells[i];
            try {
                const auto res = execute_sample(c.req, c.dir, c.graph->backend);
                const auto purity = window_purity(res.trace, *res.labels, window);
                const double max_purity = purity.empty() ? std::nan("") : *std::max_element(purity.begin(), purity.end());
                const auto report = evaluate(sampled_network(res.graph, res.trace.inclusion_order()));
                const double final_boundary =
                    res.trace.steps.empty() ? res.trace.initial_boundary : res.trace.steps.back().boundary;
                c.row = fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}", text::format_double(c.graph->r),
                                    c.strategy, c.graph->rep, c.graph->seed, res.trace.steps.size(),
                                    res.trace.final_insiders(), text::format_double(final_boundary),
                                    std::isnan(max_purity) ? std::string() : text::format_double(max_purity),
                                    text::format_double(report.cc_local), text::format_double(report.cc_global),
                                    std::isnan(report.avg_shortest_path) ? std::string()
                                                                         : text::format_double(report.avg_shortest_path),
                                    text::format_double(report.avg_degree));
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    const auto workers = worker_count(cells.size());
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    for (const auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }

    const std::string header =
        "r,strategy,repeat,rng_seed,steps,insiders,final_boundary,max_window_purity,cc_local,"
        "cc_global,avg_shortest_path,avg_degree";
    if (g.format == "json") {
        json rows = json::array();
        const auto keys = split_list(header);
        for (const auto& c : cells) {
            const auto vals = text::split_fields(c.row, ',');
            json row;
            for (std::size_t k = 0; k < keys.size(); ++k) {
                auto d = text::parse_double(vals[k]);
                if (k == 1) {
                    row[keys[k]] = vals[k];
                } else if (vals[k].empty()) {
                    row[keys[k]] = nullptr;
                } else {
                    row[keys[k]] = d ? json(*d) : json(vals[k]);
                }
            }
            rows.push_back(row);
        }
        write_file(root / "sweep.json", json{{"window", window}, {"cells", rows}}.dump(2) + "\n");
    } else {
        std::ostringstream s;
        s << header << '\n';
        for (const auto& c : cells) s << c.row << '\n';
        write_file(root / "sweep.csv", s.str());
    }
    out << fmt::format("{} runs ({} r x {} strategies x {} repeats) on {} workers\n", cells.size(),
                       rs.size(), strategies.size(), a.repeats, workers);
    return 0;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Tight snowball sampling on directed, weighted networks", "snowball"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    Globals g;
    std::string log_level = "warn";
    auto* seed_opt = app.add_option("--seed", g.seed, "RNG seed recorded in every output");
    app.add_option("--out", g.out, "Output directory")->capture_default_str();
    app.add_option("--format", g.format, "Report format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    app.add_option("--log-level", log_level, "trace, debug, info, warn, error, off")
        ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

    CalibrateArgs cal;
    auto* c = app.add_subcommand("calibrate", "Derive pattern weights from an engagement log");
    c->add_option("--events", cal.events, "JSONL or CSV engagement log")->required()->check(CLI::ExistingFile);
    c->add_option("--events-format", cal.events_format, "auto, jsonl or csv")->capture_default_str();
    c->add_option("--scheme", cal.scheme, "distinct, nested, audience-facing, audience-facing-distinct")
        ->capture_default_str();
    c->add_option("--seeds-file", cal.seeds_file, "Seed user ids for the author-activity filter")
        ->check(CLI::ExistingFile);
    c->add_option("--trim", cal.trim, "Keep tweets in this lower quantile of interactor count")
        ->capture_default_str();
    c->add_flag("--require-author-activity", cal.require_author_activity,
                "Drop seeds that authored no tweet");
    c->add_option("--max-malformed", cal.max_malformed, "Tolerated fraction of malformed rows")
        ->capture_default_str();

    GenArgs gen;
    auto add_gen_options = [&gen](CLI::App* sub) {
        sub->add_option("--config", gen.config, "key = value SBM config file")->check(CLI::ExistingFile);
        sub->add_option("--block-sizes", gen.block_sizes, "Comma-separated block sizes");
        sub->add_option("--blocks", gen.blocks, "Number of equal blocks")->capture_default_str();
        sub->add_option("--block-size", gen.block_size, "Nodes per block")->capture_default_str();
        sub->add_option("--k", gen.k, "Mean intra-block degree")->capture_default_str();
        sub->add_option("--r", gen.r, "Intra/inter edge ratio")->capture_default_str();
        sub->add_option("--seeds", gen.seeds, "Seeds per block, \"[i]*j\" or a list (default one per block)");
        sub->add_option("--selection", gen.selection, "uniform, low-degree or high-degree")
            ->capture_default_str();
    };
    auto* gs = app.add_subcommand("gen-sbm", "Generate a planted-partition network");
    add_gen_options(gs);

    SampleArgs smp;
    auto* s = app.add_subcommand("sample", "Grow a sample from seeds");
    s->add_option("--graph", smp.req.graph, "Edge list TSV")->check(CLI::ExistingFile);
    s->add_flag("--directed", smp.req.directed, "Treat the edge list as directed");
    s->add_option("--events", smp.req.events, "Engagement log backing the oracle")->check(CLI::ExistingFile);
    s->add_option("--events-format", smp.req.events_format, "auto, jsonl or csv");
    s->add_option("--seeds", smp.seeds_list, "Comma-separated seed ids");
    s->add_option("--seeds-file", smp.seeds_file, "Seed ids, one per line")->check(CLI::ExistingFile);
    s->add_option("--strategy", smp.req.strategy, "MAS, RI_MAS, RO, RI_RO, RS_DU, RS_DW, RS_SU, RS_SW")
        ->capture_default_str();
    s->add_option("--weights", smp.req.weights, "Weight table from calibrate")->check(CLI::ExistingFile);
    s->add_option("--scale", smp.req.scale, "Multiply every edge weight")->capture_default_str();
    s->add_option("--steps", smp.steps, "Stop after this many selections");
    s->add_option("--insiders", smp.insiders, "Stop at this many insiders");
    s->add_option("--tie-break", smp.req.tie_break, "discovery or random")->capture_default_str();
    s->add_option("--labels", smp.req.labels, "node,community CSV for evolution.csv")
        ->check(CLI::ExistingFile);
    s->add_option("--manifest", smp.manifest, "Replay a previous run")->check(CLI::ExistingFile);

    MetricsArgs met;
    auto* m = app.add_subcommand("metrics", "Structural metrics of sampled networks");
    m->add_option("--run", met.runs, "Run directory (repeatable)")->required()->check(CLI::ExistingDirectory);
    m->add_option("--labels", met.labels, "node,community CSV")->check(CLI::ExistingFile);
    m->add_flag("--no-min-common", met.no_min_common, "Compare full samples instead of truncating");
    m->add_option("--window", met.window, "Inflection detector window")->capture_default_str();
    m->add_option("--z", met.z, "Inflection detector threshold")->capture_default_str();

    SweepArgs sw;
    auto* w = app.add_subcommand("sweep", "Strategies x r values x repeats on generated networks");
    w->add_option("--config", sw.gen.config, "key = value SBM config file")->check(CLI::ExistingFile);
    w->add_option("--block-sizes", sw.gen.block_sizes, "Comma-separated block sizes");
    w->add_option("--blocks", sw.gen.blocks, "Number of equal blocks")->capture_default_str();
    w->add_option("--block-size", sw.gen.block_size, "Nodes per block")->capture_default_str();
    w->add_option("--k", sw.gen.k, "Mean intra-block degree")->capture_default_str();
    w->add_option("--seeds", sw.gen.seeds, "Seeds per block (default one per block)");
    w->add_option("--selection", sw.gen.selection, "uniform, low-degree or high-degree")
        ->capture_default_str();
    w->add_option("--r", sw.r_list, "Comma-separated r values (default 1/(b-1),0.5,1,2,4,8)");
    w->add_option("--strategies", sw.strategies, "Comma-separated strategies (default all)");
    w->add_option("--repeats", sw.repeats, "Repeats per cell")->capture_default_str();
    w->add_option("--steps", sw.steps, "Selections per run (default: until exhausted)");
    w->add_option("--window", sw.window, "Purity window (default 0.9 x smallest block)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    spdlog::set_level(spdlog::level::from_str(log_level));
    g.seed_given = seed_opt->count() > 0;
    gen.k_given = gs->count("--k") > 0;
    gen.r_given = gs->count("--r") > 0;
    gen.seeds_given = gs->count("--seeds") > 0;
    sw.gen.k_given = w->count("--k") > 0;
    sw.gen.seeds_given = w->count("--seeds") > 0;

    try {
        if (c->parsed()) return cmd_calibrate(g, cal, out);
        if (gs->parsed()) return cmd_gen_sbm(g, gen, out);
        if (s->parsed()) return cmd_sample(g, smp, out);
        if (m->parsed()) return cmd_metrics(g, met, out);
        if (w->parsed()) return cmd_sweep(g, sw, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const NodeNotDiscoverable& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const DataError& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv{"snowball"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

} // namespace snowball::cli
