#pragma once

#include <algorithm>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "ucreat/conllu.hpp"
#include "ucreat/corpus.hpp"
#include "ucreat/detail/hash.hpp"
#include "ucreat/detail/parallel.hpp"
#include "ucreat/error.hpp"
#include "ucreat/evaluation.hpp"
#include "ucreat/events.hpp"
#include "ucreat/representations.hpp"
#include "ucreat/retrieval.hpp"
#include "ucreat/version.hpp"

namespace ucreat {

namespace fs = std::filesystem;

/// Everything needed to reproduce one run. Paths are stored resolved.
struct run_config {
    std::string name = "run";
    variant kind = variant::words;
    scorer score = scorer::bm25;
    std::size_t ngram_order = 1;
    bool cumulative = true;
    bm25_params bm25;
    k_range ks;
    bool strip_citation_sentences = false;
    bool keep_citation_marker = false;
    std::size_t workers = 1;
    std::size_t max_events_per_verb = 16;
    std::map<std::string, std::string> label_map;
    std::set<std::string> query_labels{"facts", "argument", "ratio"};
    std::set<std::string> candidate_labels{"facts", "argument", "ratio", "judgment"};

    std::string corpus_dir;
    std::string parses_dir;
    std::string labels_dir;
    std::string events_cache;
    std::string out_dir = "runs";
    std::string honorifics_file;
    std::string short_forms_file;

    bool needs_events() const noexcept
    {
        return kind == variant::atomic_events || kind == variant::nonatomic_events || kind == variant::event_filtered;
    }

    bool needs_parses() const noexcept
    {
        return needs_events() || kind == variant::label_filtered || strip_citation_sentences;
    }

    extraction_options extraction() const
    {
        extraction_options o;
        o.max_events_per_verb = max_events_per_verb;
        o.keep_citation_marker = keep_citation_marker;
        o.label_map = label_map;
        return o;
    }

    normalization_rules normalization() const
    {
        auto rules = normalization_rules::defaults();
        if (!honorifics_file.empty()) {
            rules.honorifics = normalization_rules::read_honorifics(honorifics_file);
        }
        if (!short_forms_file.empty()) {
            rules.short_forms = normalization_rules::read_short_forms(short_forms_file);
        }
        return rules;
    }

    void validate() const
    {
        if (score == scorer::jaccard && kind != variant::atomic_events) {
            throw config_error("scorer 'jaccard' requires variant 'atomic_events', got '"
                + std::string(to_string(kind)) + "'");
        }
        if (ngram_order < 1) {
            throw config_error("ngram_order must be >= 1");
        }
        if (workers < 1) {
            throw config_error("workers must be >= 1");
        }
        if (max_events_per_verb < 1) {
            throw config_error("max_events_per_verb must be >= 1");
        }
        if (bm25.k1 < 0.0 || bm25.b < 0.0 || bm25.b > 1.0) {
            throw config_error("bm25 parameters out of range (k1 >= 0, 0 <= b <= 1)");
        }
        ks.values();
        if (corpus_dir.empty()) {
            throw config_error("no corpus directory configured");
        }
        if (needs_parses() && parses_dir.empty()) {
            throw config_error("variant '" + std::string(to_string(kind)) + "' needs paths.parses_dir");
        }
        if (kind == variant::label_filtered && labels_dir.empty()) {
            throw config_error("variant 'label_filtered' needs paths.labels_dir");
        }
        if (name.empty() || name.find('/') != std::string::npos) {
            throw config_error("run name must be a non-empty path component");
        }
    }

    nlohmann::json to_json() const
    {
        return {
            {"name", name},
            {"variant", to_string(kind)},
            {"scorer", to_string(score)},
            {"ngram_order", ngram_order},
            {"cumulative", cumulative},
            {"k1", bm25.k1},
            {"b", bm25.b},
            {"k_range", {ks.min, ks.max}},
            {"strip_citation_sentences", strip_citation_sentences},
            {"keep_citation_marker", keep_citation_marker},
            {"workers", workers},
            {"max_events_per_verb", max_events_per_verb},
            {"label_map", label_map},
            {"query_labels", query_labels},
            {"candidate_labels", candidate_labels},
            {"paths",
                {
                    {"corpus", corpus_dir},
                    {"parses_dir", parses_dir},
                    {"labels_dir", labels_dir},
                    {"events_cache", events_cache},
                    {"out_dir", out_dir},
                    {"honorifics_file", honorifics_file},
                    {"short_forms_file", short_forms_file},
                }},
        };
    }

    /// Relative paths resolve against `base` (normally the config file's
    /// directory). Unknown keys are rejected.
    static run_config from_json(nlohmann::json const& j, fs::path const& base = fs::current_path())
    {
        if (!j.is_object()) {
            throw config_error("config must be a JSON object");
        }
        static std::set<std::string> const known{"name", "variant", "scorer", "ngram_order", "cumulative", "k1", "b",
            "k_range", "strip_citation_sentences", "keep_citation_marker", "workers", "max_events_per_verb",
            "label_map", "query_labels", "candidate_labels", "paths"};
        static std::set<std::string> const known_paths{"corpus", "parses_dir", "labels_dir", "events_cache",
            "out_dir", "honorifics_file", "short_forms_file"};
        for (auto const& [key, value] : j.items()) {
            if (!known.contains(key)) {
                throw config_error("unknown config key '" + key + "'");
            }
        }

        run_config c;
        try {
            c.name = j.value("name", c.name);
            if (j.contains("variant")) {
                auto v = j["variant"].get<std::string>();
                auto parsed = parse_variant(v);
                if (!parsed) {
                    throw config_error("unknown variant '" + v + "'");
                }
                c.kind = *parsed;
            }
            if (j.contains("scorer")) {
                auto s = j["scorer"].get<std::string>();
                auto parsed = parse_scorer(s);
                if (!parsed) {
                    throw config_error("unknown scorer '" + s + "'");
                }
                c.score = *parsed;
            }
            if (j.contains("ngram_order")) {
                auto n = j["ngram_order"].get<long long>();
                if (n < 1) {
                    throw config_error("ngram_order must be >= 1");
                }
                c.ngram_order = static_cast<std::size_t>(n);
            }
            c.cumulative = j.value("cumulative", c.cumulative);
            c.bm25.k1 = j.value("k1", c.bm25.k1);
            c.bm25.b = j.value("b", c.bm25.b);
            if (j.contains("k_range")) {
                auto const& r = j["k_range"];
                if (!r.is_array() || r.size() != 2) {
                    throw config_error("k_range must be [min, max]");
                }
                c.ks = {r[0].get<std::size_t>(), r[1].get<std::size_t>()};
            }
            c.strip_citation_sentences = j.value("strip_citation_sentences", c.strip_citation_sentences);
            c.keep_citation_marker = j.value("keep_citation_marker", c.keep_citation_marker);
            if (j.contains("workers")) {
                auto w = j["workers"].get<long long>();
                if (w < 1) {
                    throw config_error("workers must be >= 1");
                }
                c.workers = static_cast<std::size_t>(w);
            }
            c.max_events_per_verb = j.value("max_events_per_verb", c.max_events_per_verb);
            if (j.contains("label_map")) {
                for (auto const& [k, v] : j["label_map"].items()) {
                    c.label_map[detail::to_lower(k)] = detail::to_lower(v.get<std::string>());
                }
            }
            if (j.contains("query_labels")) {
                c.query_labels = j["query_labels"].get<std::set<std::string>>();
            }
            if (j.contains("candidate_labels")) {
                c.candidate_labels = j["candidate_labels"].get<std::set<std::string>>();
            }
            if (j.contains("paths")) {
                auto const& p = j["paths"];
                if (!p.is_object()) {
                    throw config_error("paths must be an object");
                }
                for (auto const& [key, value] : p.items()) {
                    if (!known_paths.contains(key)) {
                        throw config_error("unknown paths key '" + key + "'");
                    }
                }
                auto resolve = [&](char const* key, std::string& target) {
                    if (p.contains(key)) {
                        auto s = p[key].get<std::string>();
                        target = s.empty() ? s : (base / s).lexically_normal().string();
                    }
                };
                resolve("corpus", c.corpus_dir);
                resolve("parses_dir", c.parses_dir);
                resolve("labels_dir", c.labels_dir);
                resolve("events_cache", c.events_cache);
                resolve("out_dir", c.out_dir);
                resolve("honorifics_file", c.honorifics_file);
                resolve("short_forms_file", c.short_forms_file);
            }
        } catch (nlohmann::json::exception const& e) {
            throw config_error(std::string("malformed config: ") + e.what());
        }
        return c;
    }

    static run_config from_file(fs::path const& path)
    {
        std::ifstream in(path);
        if (!in) {
            throw config_error("cannot read config '" + path.string() + "'");
        }
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(in);
        } catch (nlohmann::json::parse_error const& e) {
            throw config_error(path.string() + ": invalid JSON: " + e.what());
        }
        return from_json(j, fs::absolute(path).parent_path());
    }
};

// ---------------------------------------------------------------------------
// Event cache: events/<doc_id>.jsonl, a header line followed by one event per
// line. The header records the SHA-256 of the source parse file, the
// extractor version and the extraction options.

inline std::string options_fingerprint(extraction_options const& o)
{
    nlohmann::json j{{"max_events_per_verb", o.max_events_per_verb}, {"keep_citation_marker", o.keep_citation_marker},
        {"label_map", o.label_map}};
    return j.dump();
}

inline nlohmann::json cache_header(std::string const& doc_id, std::string const& source_hash,
    extraction_options const& o)
{
    return {{"doc_id", doc_id}, {"source_sha256", source_hash}, {"extractor", extractor_version},
        {"options", options_fingerprint(o)}};
}

inline void write_event_cache(fs::path const& path, event_sequence const& seq, std::string const& source_hash,
    extraction_options const& o)
{
    fs::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw ingestion_error(tmp.string());
        }
        out << cache_header(seq.doc_id, source_hash, o).dump() << '\n';
        for (auto const& e : seq.events) {
            out << to_json(e).dump() << '\n';
        }
    }
    fs::rename(tmp, path);
}

/// Returns the cached sequence when the file exists, its header matches and
/// every line is well formed; otherwise nothing.
inline std::optional<event_sequence> read_event_cache(fs::path const& path, std::string const& doc_id,
    std::string const& source_hash, extraction_options const& o)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        return std::nullopt;
    }
    std::string line;
    if (!std::getline(in, line)) {
        return std::nullopt;
    }
    try {
        if (nlohmann::json::parse(line) != cache_header(doc_id, source_hash, o)) {
            return std::nullopt;
        }
        event_sequence seq{doc_id, {}};
        while (std::getline(in, line)) {
            if (line.empty()) {
                continue;
            }
            seq.events.push_back(event_from_json(nlohmann::json::parse(line)));
        }
        return seq;
    } catch (nlohmann::json::exception const&) {
        return std::nullopt;
    }
}

// ---------------------------------------------------------------------------

/// Disk inputs of a run, loaded once. Parses, labels and cached events are
/// keyed by document id and present only when the variant needs them.
struct pipeline_inputs {
    corpus docs;
    std::map<std::string, parsed_document> parses;
    std::map<std::string, sentence_labels> labels;
    std::map<std::string, event_sequence> cached_events;
    std::map<std::string, std::string> input_hashes;
};

inline std::string hash_corpus_files(fs::path const& root, corpus const& c)
{
    detail::sha256 h;
    for (auto const* name : {"candidates.json", "splits.json", "citations.json"}) {
        h.update(name).update(std::string_view("\0", 1));
        h.update(detail::sha256_hex(detail::read_text_file(root / name)));
    }
    for (auto const& d : c.documents) {
        h.update(d.doc_id).update(std::string_view("\0", 1));
        h.update(detail::sha256_hex(detail::read_text_file(root / "documents" / (d.doc_id + ".txt"))));
    }
    return h.hex();
}

/// Reads parses/<id>.conllu for every corpus document. Missing files are
/// reported together. Returns per-document source hashes through `hashes`.
inline std::map<std::string, parsed_document> load_parses(fs::path const& dir, corpus const& c,
    std::map<std::string, std::string>* hashes = nullptr)
{
    std::vector<std::string> missing;
    for (auto const& d : c.documents) {
        if (!fs::exists(dir / (d.doc_id + ".conllu"))) {
            missing.push_back(d.doc_id);
        }
    }
    if (!missing.empty()) {
        throw error("missing parse files in '" + dir.string() + "' for: " + detail::join(missing, ", "));
    }
    std::map<std::string, parsed_document> out;
    for (auto const& d : c.documents) {
        auto text = detail::read_text_file(dir / (d.doc_id + ".conllu"));
        if (hashes != nullptr) {
            (*hashes)[d.doc_id] = detail::sha256_hex(text);
        }
        std::istringstream in(text);
        out.emplace(d.doc_id, read_conllu(in, d.doc_id));
    }
    return out;
}

inline std::string combine_hashes(std::map<std::string, std::string> const& hashes)
{
    detail::sha256 h;
    for (auto const& [id, value] : hashes) {
        h.update(id).update(std::string_view("\0", 1)).update(value).update("\n");
    }
    return h.hex();
}

/// Loads everything `cfg` needs from disk. `use_event_cache` lets fresh
/// cache entries stand in for extraction.
inline pipeline_inputs load_inputs(run_config const& cfg, bool use_event_cache = true)
{
    cfg.validate();
    pipeline_inputs in;
    fs::path root(cfg.corpus_dir);
    in.docs = load_corpus(root, cfg.normalization());
    in.input_hashes["corpus"] = hash_corpus_files(root, in.docs);

    if (cfg.needs_parses()) {
        std::map<std::string, std::string> hashes;
        in.parses = load_parses(cfg.parses_dir, in.docs, &hashes);
        in.input_hashes["parses"] = combine_hashes(hashes);
        if (use_event_cache && cfg.needs_events() && !cfg.events_cache.empty() && !cfg.strip_citation_sentences) {
            auto opts = cfg.extraction();
            for (auto const& [id, hash] : hashes) {
                auto cached = read_event_cache(fs::path(cfg.events_cache) / (id + ".jsonl"), id, hash, opts);
                if (cached) {
                    in.cached_events.emplace(id, std::move(*cached));
                }
            }
        }
    }
    if (cfg.kind == variant::label_filtered) {
        std::map<std::string, std::string> hashes;
        for (auto const& d : in.docs.documents) {
            auto path = fs::path(cfg.labels_dir) / (d.doc_id + ".json");
            hashes[d.doc_id] = detail::sha256_hex(detail::read_text_file(path));
            auto labels = read_labels(path, d.doc_id);
            check_alignment(in.parses.at(d.doc_id), labels);
            in.labels.emplace(d.doc_id, std::move(labels));
        }
        in.input_hashes["labels"] = combine_hashes(hashes);
    }
    return in;
}

struct run_result {
    std::vector<std::string> query_order;       // train, validation, test
    std::map<std::string, std::vector<ranked_list>> rankings;  // by split
    metrics_report report;
    timing_report timing;
    double mean_candidate_stream_tokens = 0.0;
};

namespace detail {

    inline std::vector<std::string> concat_splits(query_splits const& s)
    {
        std::vector<std::string> out;
        out.insert(out.end(), s.train.begin(), s.train.end());
        out.insert(out.end(), s.validation.begin(), s.validation.end());
        out.insert(out.end(), s.test.begin(), s.test.end());
        return out;
    }

}  // namespace detail

/// Runs representation, extraction, indexing and scoring for every split
/// query, then evaluates. Stages are barrier-synchronised; within a stage
/// work is spread over `cfg.workers` threads with results in fixed slots.
inline run_result execute(run_config const& cfg, pipeline_inputs const& in)
{
    cfg.validate();
    auto const& manifest = in.docs.manifest;
    auto const& all_docs = in.docs.documents;
    auto const n_docs = all_docs.size();
    auto const workers = cfg.workers;

    run_result result;
    result.query_order = detail::concat_splits(manifest.splits);
    result.timing.workers = workers;
    result.timing.query_count = result.query_order.size();

    std::unordered_map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < n_docs; ++i) {
        pos.emplace(all_docs[i].doc_id, i);
    }

    stopwatch total;
    stopwatch lap;

    // Document views, replaced by stripped copies when requested.
    std::vector<normalized_document const*> doc(n_docs);
    std::vector<parsed_document const*> parsed(n_docs, nullptr);
    std::vector<sentence_labels const*> labels(n_docs, nullptr);
    std::vector<normalized_document> stripped_docs(cfg.strip_citation_sentences ? n_docs : 0);
    std::vector<parsed_document> stripped_parses(cfg.strip_citation_sentences ? n_docs : 0);
    std::vector<sentence_labels> stripped_labels(cfg.strip_citation_sentences ? n_docs : 0);
    for (std::size_t i = 0; i < n_docs; ++i) {
        doc[i] = &all_docs[i];
        if (cfg.needs_parses()) {
            parsed[i] = &in.parses.at(all_docs[i].doc_id);
        }
        if (cfg.kind == variant::label_filtered) {
            labels[i] = &in.labels.at(all_docs[i].doc_id);
        }
    }
    if (cfg.strip_citation_sentences) {
        detail::parallel_for(n_docs, workers, [&](std::size_t i) {
            auto kept = citation_free_sentences(*parsed[i]);
            auto [d, p] = ucreat::strip_citation_sentences(*doc[i], *parsed[i]);
            stripped_docs[i] = std::move(d);
            stripped_parses[i] = std::move(p);
            if (labels[i] != nullptr) {
                check_alignment(*parsed[i], *labels[i]);
                stripped_labels[i].doc_id = labels[i]->doc_id;
                for (auto k : kept) {
                    stripped_labels[i].labels.push_back(labels[i]->labels[k]);
                }
                labels[i] = &stripped_labels[i];
            }
        });
        for (std::size_t i = 0; i < n_docs; ++i) {
            doc[i] = &stripped_docs[i];
            parsed[i] = &stripped_parses[i];
        }
    }
    result.timing.representation += lap.lap();

    std::vector<event_sequence> events(cfg.needs_events() ? n_docs : 0);
    if (cfg.needs_events()) {
        auto opts = cfg.extraction();
        detail::parallel_for(n_docs, workers, [&](std::size_t i) {
            auto const& id = all_docs[i].doc_id;
            if (auto it = in.cached_events.find(id); it != in.cached_events.end() && !cfg.strip_citation_sentences) {
                events[i] = it->second;
            } else {
                events[i] = extract_events(*parsed[i], opts);
            }
        });
        result.timing.event_extraction += lap.lap();
    }

    auto const& candidates = manifest.candidate_ids;
    auto const& queries = result.query_order;
    auto const order = cfg.ngram_order;

    auto stream_for = [&](std::size_t i, bool as_query) -> token_stream {
        switch (cfg.kind) {
        case variant::words: return words_stream(*doc[i], cfg.keep_citation_marker);
        case variant::atomic_events: return atomic_event_stream(events[i]);
        case variant::nonatomic_events: return nonatomic_event_stream(events[i]);
        case variant::label_filtered:
            return label_filtered_stream(*parsed[i], *labels[i], as_query ? cfg.query_labels : cfg.candidate_labels,
                cfg.keep_citation_marker);
        case variant::event_filtered: break;
        }
        throw error("no global stream for variant '" + std::string(to_string(cfg.kind)) + "'");
    };

    std::vector<ranked_list> ranked(queries.size());

    if (cfg.score == scorer::jaccard) {
        std::unordered_map<std::string, key_set> keys;
        std::vector<key_set> slots(n_docs);
        detail::parallel_for(n_docs, workers, [&](std::size_t i) { slots[i] = event_key_set(events[i]); });
        double len = 0.0;
        for (auto const& id : candidates) {
            len += static_cast<double>(slots[pos.at(id)].size());
        }
        result.mean_candidate_stream_tokens = candidates.empty() ? 0.0 : len / static_cast<double>(candidates.size());
        for (std::size_t i = 0; i < n_docs; ++i) {
            keys.emplace(all_docs[i].doc_id, std::move(slots[i]));
        }
        result.timing.representation += lap.lap();
        detail::parallel_for(queries.size(), workers, [&](std::size_t q) {
            ranked[q] = rank_jaccard(keys.at(queries[q]), keys, candidates, queries[q]);
        });
        result.timing.scoring += lap.lap();
    } else if (cfg.kind == variant::event_filtered) {
        std::vector<event_profile> slots(n_docs);
        detail::parallel_for(n_docs, workers, [&](std::size_t i) {
            slots[i] = event_profile::build(*parsed[i], events[i], cfg.keep_citation_marker);
        });
        std::unordered_map<std::string, event_profile> profiles;
        for (std::size_t i = 0; i < n_docs; ++i) {
            profiles.emplace(all_docs[i].doc_id, std::move(slots[i]));
        }
        result.timing.representation += lap.lap();
        filtered_rank_params params{cfg.score, order, cfg.cumulative, cfg.bm25};
        detail::parallel_for(queries.size(), workers, [&](std::size_t q) {
            ranked[q] = pairwise_filtered_rank(profiles.at(queries[q]), profiles, candidates, params);
        });
        result.timing.scoring += lap.lap();
    } else {
        std::vector<token_stream> cand_streams(candidates.size());
        std::vector<std::vector<std::string>> query_streams(queries.size());
        detail::parallel_for(candidates.size(), workers, [&](std::size_t c) {
            cand_streams[c] = ngrams(stream_for(pos.at(candidates[c]), false), order, cfg.cumulative);
        });
        detail::parallel_for(queries.size(), workers, [&](std::size_t q) {
            query_streams[q] = ngrams(stream_for(pos.at(queries[q]), true), order, cfg.cumulative).tokens;
        });
        double len = 0.0;
        for (auto const& s : cand_streams) {
            len += static_cast<double>(s.tokens.size());
        }
        result.mean_candidate_stream_tokens =
            cand_streams.empty() ? 0.0 : len / static_cast<double>(cand_streams.size());
        result.timing.representation += lap.lap();

        auto index = build_index(cand_streams, cfg.bm25);
        result.timing.index_build += lap.lap();

        detail::parallel_for(queries.size(), workers, [&](std::size_t q) {
            ranked[q] = rank(index, query_streams[q], candidates, queries[q], cfg.score);
        });
        result.timing.scoring += lap.lap();
    }
    result.timing.total = total.seconds();

    std::size_t q = 0;
    for (auto const& [split, ids] : {std::pair<char const*, std::vector<std::string> const*>{"train", &manifest.splits.train},
             {"validation", &manifest.splits.validation}, {"test", &manifest.splits.test}}) {
        auto& out = result.rankings[split];
        for (std::size_t i = 0; i < ids->size(); ++i) {
            out.push_back(std::move(ranked[q++]));
        }
    }
    auto ks = cfg.ks.values();
    result.report = evaluate_run(result.rankings, manifest.gold, ks);
    return result;
}

// ---------------------------------------------------------------------------
// Artifacts

inline std::string rankings_jsonl(run_result const& r)
{
    std::string out;
    for (auto const* split : {"train", "validation", "test"}) {
        auto it = r.rankings.find(split);
        if (it == r.rankings.end()) {
            continue;
        }
        for (auto const& list : it->second) {
            nlohmann::json ranking = nlohmann::json::array();
            for (auto const& e : list.entries) {
                ranking.push_back({e.candidate_id, e.score});
            }
            out += nlohmann::json{{"query", list.query_id}, {"ranking", std::move(ranking)}}.dump();
            out += '\n';
        }
    }
    return out;
}

inline std::string metrics_csv(metrics_report const& report)
{
    std::ostringstream out;
    out << "split,K,precision,recall,f1\n";
    out << std::fixed << std::setprecision(6);
    for (auto const* split : {"train", "validation", "test"}) {
        auto it = report.curves.find(split);
        if (it == report.curves.end()) {
            continue;
        }
        for (auto const& p : it->second) {
            out << split << ',' << p.k << ',' << p.precision << ',' << p.recall << ',' << p.f1 << '\n';
        }
    }
    return out.str();
}

inline std::string utc_timestamp()
{
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

inline nlohmann::json summary_json(run_config const& cfg, pipeline_inputs const& in, run_result const& r,
    std::string const& started_at, std::string const& finished_at)
{
    auto const& val = r.report.curves.at("validation");
    auto best = std::find_if(val.begin(), val.end(), [&](auto const& p) { return p.k == r.report.selected_k; });
    return {
        {"name", cfg.name},
        {"tool_version", version},
        {"selected_K", r.report.selected_k},
        {"test", to_json(r.report.test_point)},
        {"validation_at_selected_K", best != val.end() ? to_json(*best) : nlohmann::json()},
        {"config", cfg.to_json()},
        {"timing", to_json(r.timing)},
        {"inputs", in.input_hashes},
        {"queries", r.query_order.size()},
        {"candidates", in.docs.manifest.candidate_ids.size()},
        {"mean_candidate_stream_tokens", r.mean_candidate_stream_tokens},
        {"started_at", started_at},
        {"finished_at", finished_at},
    };
}

inline void write_file(fs::path const& path, std::string const& data)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ingestion_error(path.string());
    }
    out << data;
}

/// Loads inputs, executes and writes rankings.jsonl, metrics.csv and
/// summary.json under `<out_dir>/<name>/`.
inline run_result run_pipeline(run_config const& cfg, bool use_event_cache = true)
{
    auto started = utc_timestamp();
    auto inputs = load_inputs(cfg, use_event_cache);
    auto result = execute(cfg, inputs);
    auto dir = fs::path(cfg.out_dir) / cfg.name;
    fs::create_directories(dir);
    write_file(dir / "rankings.jsonl", rankings_jsonl(result));
    write_file(dir / "metrics.csv", metrics_csv(result.report));
    write_file(dir / "summary.json", summary_json(cfg, inputs, result, started, utc_timestamp()).dump(2) + "\n");
    return result;
}

// ---------------------------------------------------------------------------
// ingest / extract-events

struct ingest_stats {
    std::size_t documents = 0;
    std::size_t candidates = 0;
    std::size_t queries = 0;
    std::size_t train = 0;
    std::size_t validation = 0;
    std::size_t test = 0;
    std::size_t citation_links = 0;
    double avg_citations_per_query = 0.0;
    double avg_document_tokens = 0.0;
};

inline ingest_stats compute_ingest_stats(corpus const& c)
{
    ingest_stats s;
    auto const& m = c.manifest;
    s.documents = c.documents.size();
    s.candidates = m.candidate_ids.size();
    s.train = m.splits.train.size();
    s.validation = m.splits.validation.size();
    s.test = m.splits.test.size();
    s.queries = m.query_count();
    for (auto const& id : detail::concat_splits(m.splits)) {
        s.citation_links += m.gold.at(id).size();
    }
    if (s.queries > 0) {
        s.avg_citations_per_query = static_cast<double>(s.citation_links) / static_cast<double>(s.queries);
    }
    std::size_t tokens = 0;
    for (auto const& d : c.documents) {
        tokens += words_stream(d).tokens.size();
    }
    if (s.documents > 0) {
        s.avg_document_tokens = static_cast<double>(tokens) / static_cast<double>(s.documents);
    }
    return s;
}

struct extract_stats {
    std::size_t extracted = 0;
    std::size_t fresh = 0;
    std::size_t events = 0;
};

/// Writes events/<id>.jsonl for every corpus document, skipping entries
/// whose header still matches the parse file.
inline extract_stats extract_events_to_cache(corpus const& c, fs::path const& parses_dir, fs::path const& out_dir,
    extraction_options const& opts, std::size_t workers = 1)
{
    std::map<std::string, std::string> hashes;
    auto parses = load_parses(parses_dir, c, &hashes);
    std::vector<std::string> ids;
    for (auto const& d : c.documents) {
        ids.push_back(d.doc_id);
    }
    std::vector<int> fresh(ids.size(), 0);
    std::vector<std::size_t> counts(ids.size(), 0);
    detail::parallel_for(ids.size(), workers, [&](std::size_t i) {
        auto const& id = ids[i];
        auto path = out_dir / (id + ".jsonl");
        if (auto cached = read_event_cache(path, id, hashes.at(id), opts)) {
            fresh[i] = 1;
            counts[i] = cached->events.size();
            return;
        }
        auto seq = extract_events(parses.at(id), opts);
        counts[i] = seq.events.size();
        write_event_cache(path, seq, hashes.at(id), opts);
    });
    extract_stats s;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        s.fresh += fresh[i];
        s.events += counts[i];
    }
    s.extracted = ids.size() - s.fresh;
    return s;
}

}  // namespace ucreat
