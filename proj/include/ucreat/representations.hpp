#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ucreat/conllu.hpp"
#include "ucreat/corpus.hpp"
#include "ucreat/detail/text.hpp"
#include "ucreat/error.hpp"
#include "ucreat/events.hpp"

namespace ucreat {

enum class variant { words, atomic_events, nonatomic_events, event_filtered, label_filtered };

inline std::string_view to_string(variant v) noexcept
{
    switch (v) {
    case variant::words: return "words";
    case variant::atomic_events: return "atomic_events";
    case variant::nonatomic_events: return "nonatomic_events";
    case variant::event_filtered: return "event_filtered";
    case variant::label_filtered: return "label_filtered";
    }
    return "unknown";
}

inline std::optional<variant> parse_variant(std::string_view name) noexcept
{
    for (auto v : {variant::words, variant::atomic_events, variant::nonatomic_events, variant::event_filtered,
             variant::label_filtered}) {
        if (to_string(v) == name) {
            return v;
        }
    }
    return std::nullopt;
}

struct token_stream {
    std::string doc_id;
    variant kind = variant::words;
    std::vector<std::string> tokens;

    bool operator==(token_stream const&) const = default;
};

/// Joins the words of an n-gram. Never produced by the word tokenizer.
inline constexpr char ngram_separator = '\x1f';

/// Appends lowercased alphanumeric runs of length >= 2 found in `text`.
/// Citation markers are dropped, or kept verbatim as one token.
inline void append_words(std::string_view text, bool keep_citation_marker, std::vector<std::string>& out)
{
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] == '<' && text.substr(i, citation_marker.size()) == citation_marker) {
            if (keep_citation_marker) {
                out.emplace_back(citation_marker);
            }
            i += citation_marker.size();
            continue;
        }
        if (!detail::is_word_byte(text[i])) {
            ++i;
            continue;
        }
        auto j = i;
        while (j < text.size() && detail::is_word_byte(text[j])) {
            ++j;
        }
        if (j - i >= 2) {
            out.push_back(detail::to_lower(text.substr(i, j - i)));
        }
        i = j;
    }
}

inline token_stream words_stream(normalized_document const& doc, bool keep_citation_marker = false)
{
    token_stream s{doc.doc_id, variant::words, {}};
    append_words(doc.text, keep_citation_marker, s.tokens);
    return s;
}

/// Word tokens of one parsed sentence under the same rules as words_stream.
inline std::vector<std::string> sentence_words(parsed_sentence const& sentence, bool keep_citation_marker = false)
{
    std::vector<std::string> out;
    for (auto const& t : sentence.tokens) {
        append_words(t.form, keep_citation_marker, out);
    }
    return out;
}

inline token_stream atomic_event_stream(event_sequence const& events)
{
    token_stream s{events.doc_id, variant::atomic_events, {}};
    s.tokens.reserve(events.events.size());
    for (auto const& e : events.events) {
        s.tokens.push_back(canonical_key(e));
    }
    return s;
}

/// Words of every filled slot, in slot order subject, predicate, dobj,
/// dative, pobj.
inline token_stream nonatomic_event_stream(event_sequence const& events)
{
    token_stream s{events.doc_id, variant::nonatomic_events, {}};
    for (auto const& e : events.events) {
        for (auto const* slot : {&e.subject, &e.predicate, &e.dobj, &e.dative, &e.pobj}) {
            for (auto w : detail::split(*slot, ' ')) {
                if (!w.empty()) {
                    s.tokens.emplace_back(w);
                }
            }
        }
    }
    return s;
}

/// Per-document data for event-filtered pairs: the words of every sentence
/// and, for each canonical event key, the sentences that emitted it.
struct event_profile {
    std::string doc_id;
    std::vector<std::vector<std::string>> sentence_tokens;
    std::map<std::string, std::vector<std::size_t>> key_sentences;

    static event_profile build(parsed_document const& parsed, event_sequence const& events,
        bool keep_citation_marker = false)
    {
        event_profile p{parsed.doc_id, {}, {}};
        p.sentence_tokens.reserve(parsed.sentences.size());
        for (auto const& s : parsed.sentences) {
            p.sentence_tokens.push_back(sentence_words(s, keep_citation_marker));
        }
        for (auto const& e : events.events) {
            auto& sents = p.key_sentences[canonical_key(e)];
            if (sents.empty() || sents.back() != e.sent_index) {
                sents.push_back(e.sent_index);
            }
        }
        for (auto& [key, sents] : p.key_sentences) {
            std::sort(sents.begin(), sents.end());
            sents.erase(std::unique(sents.begin(), sents.end()), sents.end());
        }
        return p;
    }
};

namespace detail {

    inline token_stream filtered_words(event_profile const& p, std::vector<bool> const& keep)
    {
        token_stream s{p.doc_id, variant::event_filtered, {}};
        for (std::size_t i = 0; i < p.sentence_tokens.size(); ++i) {
            if (keep[i]) {
                auto const& words = p.sentence_tokens[i];
                s.tokens.insert(s.tokens.end(), words.begin(), words.end());
            }
        }
        return s;
    }

}  // namespace detail

/// Keeps, on each side, only the sentences that emitted an event shared by
/// both documents. Disjoint event sets give two empty streams.
inline std::pair<token_stream, token_stream> event_filtered_pair(event_profile const& query,
    event_profile const& candidate)
{
    std::vector<bool> keep_q(query.sentence_tokens.size(), false);
    std::vector<bool> keep_c(candidate.sentence_tokens.size(), false);
    auto qi = query.key_sentences.begin();
    auto ci = candidate.key_sentences.begin();
    while (qi != query.key_sentences.end() && ci != candidate.key_sentences.end()) {
        if (qi->first < ci->first) {
            ++qi;
        } else if (ci->first < qi->first) {
            ++ci;
        } else {
            for (auto s : qi->second) {
                keep_q.at(s) = true;
            }
            for (auto s : ci->second) {
                keep_c.at(s) = true;
            }
            ++qi;
            ++ci;
        }
    }
    return {detail::filtered_words(query, keep_q), detail::filtered_words(candidate, keep_c)};
}

inline std::pair<token_stream, token_stream> event_filtered_pair(parsed_document const& query_parsed,
    event_sequence const& query_events, parsed_document const& candidate_parsed,
    event_sequence const& candidate_events, bool keep_citation_marker = false)
{
    return event_filtered_pair(event_profile::build(query_parsed, query_events, keep_citation_marker),
        event_profile::build(candidate_parsed, candidate_events, keep_citation_marker));
}

/// One rhetorical-role label per parsed sentence.
struct sentence_labels {
    std::string doc_id;
    std::vector<std::string> labels;
};

/// Reads `{"labels": [...]}`.
inline sentence_labels read_labels(std::filesystem::path const& path, std::string doc_id)
{
    auto j = detail::read_json_file(path);
    if (!j.is_object() || !j.contains("labels")) {
        throw validation_error(path.string() + ": expected {\"labels\": [...]}");
    }
    return {std::move(doc_id), detail::json_id_list(j["labels"], path.string())};
}

inline void check_alignment(parsed_document const& parsed, sentence_labels const& labels)
{
    if (labels.labels.size() != parsed.sentences.size()) {
        throw validation_error("label alignment mismatch for '" + parsed.doc_id + "': "
            + std::to_string(labels.labels.size()) + " labels, " + std::to_string(parsed.sentences.size())
            + " sentences");
    }
}

/// Words of the sentences whose label is in `keep`, in sentence order.
inline token_stream label_filtered_stream(parsed_document const& parsed, sentence_labels const& labels,
    std::set<std::string> const& keep, bool keep_citation_marker = false)
{
    check_alignment(parsed, labels);
    token_stream s{parsed.doc_id, variant::label_filtered, {}};
    for (std::size_t i = 0; i < parsed.sentences.size(); ++i) {
        if (keep.count(labels.labels[i]) != 0) {
            auto words = sentence_words(parsed.sentences[i], keep_citation_marker);
            s.tokens.insert(s.tokens.end(), words.begin(), words.end());
        }
    }
    return s;
}

/// Contiguous n-grams joined by ngram_separator. Cumulative mode emits all
/// k-grams for k = 1..n, grouped by k.
inline std::vector<std::string> ngrams(std::vector<std::string> const& tokens, std::size_t n, bool cumulative = true)
{
    if (n == 0) {
        throw config_error("n-gram order must be >= 1");
    }
    std::vector<std::string> out;
    auto emit_order = [&](std::size_t k) {
        if (tokens.size() < k) {
            return;
        }
        for (std::size_t i = 0; i + k <= tokens.size(); ++i) {
            std::string gram = tokens[i];
            for (std::size_t j = 1; j < k; ++j) {
                gram += ngram_separator;
                gram += tokens[i + j];
            }
            out.push_back(std::move(gram));
        }
    };
    if (cumulative) {
        for (std::size_t k = 1; k <= n; ++k) {
            emit_order(k);
        }
    } else {
        emit_order(n);
    }
    return out;
}

inline token_stream ngrams(token_stream const& s, std::size_t n, bool cumulative = true)
{
    if (n == 1) {
        return s;
    }
    return {s.doc_id, s.kind, ngrams(s.tokens, n, cumulative)};
}

}  // namespace ucreat
