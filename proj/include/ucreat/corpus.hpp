#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ucreat/conllu.hpp"
#include "ucreat/detail/text.hpp"
#include "ucreat/error.hpp"

namespace ucreat {

struct normalized_document {
    std::string doc_id;
    std::string text;
    bool is_query = false;

    bool operator==(normalized_document const&) const = default;
};

struct query_splits {
    std::vector<std::string> train;
    std::vector<std::string> validation;
    std::vector<std::string> test;

    bool operator==(query_splits const&) const = default;
};

using gold_citations = std::map<std::string, std::set<std::string>>;

struct corpus_manifest {
    std::vector<std::string> candidate_ids;  // sorted, unique
    query_splits splits;
    gold_citations gold;

    std::size_t query_count() const
    {
        return splits.train.size() + splits.validation.size() + splits.test.size();
    }

    bool operator==(corpus_manifest const&) const = default;
};

struct corpus {
    corpus_manifest manifest;
    std::vector<normalized_document> documents;  // sorted by doc_id

    normalized_document const* find(std::string_view doc_id) const
    {
        auto it = std::lower_bound(documents.begin(), documents.end(), doc_id,
            [](normalized_document const& d, std::string_view id) { return d.doc_id < id; });
        if (it == documents.end() || it->doc_id != doc_id) {
            return nullptr;
        }
        return &*it;
    }

    normalized_document const& at(std::string_view doc_id) const
    {
        auto const* d = find(doc_id);
        if (d == nullptr) {
            throw lookup_error("unknown document '" + std::string(doc_id) + "'");
        }
        return *d;
    }
};

/// Honorifics to delete and abbreviations to expand during normalization.
/// Entries are matched case-insensitively against whole words, dot included.
struct normalization_rules {
    std::vector<std::string> honorifics;
    std::vector<std::pair<std::string, std::string>> short_forms;

    static normalization_rules defaults()
    {
        return {
            {"Dr.", "Mr.", "Mrs.", "Ms.", "Hon.", "Prof.", "Smt.", "Shri"},
            {{"no.", "number"}, {"nos.", "numbers"}, {"addl.", "additional"}, {"govt.", "government"}},
        };
    }

    /// One honorific per line; `#` starts a comment.
    static std::vector<std::string> read_honorifics(std::string const& path)
    {
        std::ifstream in(path);
        if (!in) {
            throw ingestion_error(path);
        }
        std::vector<std::string> out;
        std::string line;
        while (std::getline(in, line)) {
            auto t = detail::trim(line);
            if (!t.empty() && t.front() != '#') {
                out.emplace_back(t);
            }
        }
        return out;
    }

    /// `short<TAB>expansion` per line; `#` starts a comment.
    static std::vector<std::pair<std::string, std::string>> read_short_forms(std::string const& path)
    {
        std::ifstream in(path);
        if (!in) {
            throw ingestion_error(path);
        }
        std::vector<std::pair<std::string, std::string>> out;
        std::string line;
        while (std::getline(in, line)) {
            auto t = detail::trim(line);
            if (t.empty() || t.front() == '#') {
                continue;
            }
            auto tab = t.find('\t');
            if (tab == std::string_view::npos) {
                throw validation_error(path + ": short-form line without tab: '" + std::string(t) + "'");
            }
            out.emplace_back(detail::trim(t.substr(0, tab)), detail::trim(t.substr(tab + 1)));
        }
        return out;
    }
};

namespace detail {

    inline constexpr char marker_sentinel = '\x01';

    inline bool is_sentence_punct(char c) noexcept
    {
        return c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?';
    }

    // Keeps letters, digits, whitespace and sentence punctuation. Apostrophes
    // are deleted ("court's" -> "courts"); every other symbol becomes a space.
    inline void filter_characters(std::string_view in, std::string& out)
    {
        for (std::size_t i = 0; i < in.size(); ++i) {
            char c = in[i];
            auto u = static_cast<unsigned char>(c);
            if (u >= 0x80) {
                // U+2000..U+207F general punctuation (curly quotes, dashes).
                if (u == 0xE2 && i + 2 < in.size()
                    && (static_cast<unsigned char>(in[i + 1]) == 0x80
                        || static_cast<unsigned char>(in[i + 1]) == 0x81)) {
                    bool apostrophe = static_cast<unsigned char>(in[i + 1]) == 0x80
                        && (static_cast<unsigned char>(in[i + 2]) == 0x98
                            || static_cast<unsigned char>(in[i + 2]) == 0x99);
                    if (!apostrophe) {
                        out += ' ';
                    }
                    i += 2;
                    continue;
                }
                out += c;
            } else if (is_ascii_alnum(c) || is_space(c) || is_sentence_punct(c)) {
                out += c;
            } else if (c != '\'') {
                out += ' ';
            }
        }
    }

    // One or more dotted single capitals: "A.", "A.R.".
    inline bool is_initials(std::string_view w) noexcept
    {
        if (w.size() < 2 || w.size() % 2 != 0) {
            return false;
        }
        for (std::size_t i = 0; i < w.size(); i += 2) {
            if (w[i] < 'A' || w[i] > 'Z' || w[i + 1] != '.') {
                return false;
            }
        }
        return true;
    }

    inline std::optional<std::string> rewrite_word(std::string_view w, normalization_rules const& rules)
    {
        if (w.find(marker_sentinel) != std::string_view::npos) {
            return std::string(w);
        }
        for (auto const& h : rules.honorifics) {
            if (iequals(w, h)) {
                return std::nullopt;
            }
        }
        if (is_initials(w)) {
            return std::nullopt;
        }
        for (auto const& [abbr, full] : rules.short_forms) {
            if (iequals(w, abbr)) {
                std::string out = full;
                if (!out.empty() && std::isupper(static_cast<unsigned char>(w.front()))) {
                    out.front() = static_cast<char>(std::toupper(static_cast<unsigned char>(out.front())));
                }
                return out;
            }
        }
        return std::string(w);
    }

}  // namespace detail

/// Cleans raw document text: strips symbols, honorifics and dotted initials,
/// expands short forms and collapses whitespace. Citation markers pass
/// through verbatim. Idempotent.
inline std::string normalize_text(std::string_view raw,
    normalization_rules const& rules = normalization_rules::defaults())
{
    std::string filtered;
    filtered.reserve(raw.size());
    std::size_t pos = 0;
    while (true) {
        auto hit = raw.find(citation_marker, pos);
        detail::filter_characters(raw.substr(pos, hit == std::string_view::npos ? hit : hit - pos), filtered);
        if (hit == std::string_view::npos) {
            break;
        }
        filtered += detail::marker_sentinel;
        pos = hit + citation_marker.size();
    }

    std::string out;
    out.reserve(filtered.size());
    std::size_t line_start = 0;
    while (line_start <= filtered.size()) {
        auto line_end = filtered.find('\n', line_start);
        bool last = line_end == std::string::npos;
        std::string_view line(filtered.data() + line_start,
            (last ? filtered.size() : line_end) - line_start);

        bool first_word = true;
        std::size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && detail::is_space(line[i])) {
                ++i;
            }
            std::size_t j = i;
            while (j < line.size() && !detail::is_space(line[j])) {
                ++j;
            }
            if (j > i) {
                if (auto w = detail::rewrite_word(line.substr(i, j - i), rules)) {
                    if (!first_word) {
                        out += ' ';
                    }
                    for (char c : *w) {
                        if (c == detail::marker_sentinel) {
                            out += citation_marker;
                        } else {
                            out += c;
                        }
                    }
                    first_word = false;
                }
            }
            i = j;
        }
        if (last) {
            break;
        }
        out += '\n';
        line_start = line_end + 1;
    }
    return out;
}

namespace detail {

    inline std::string read_text_file(std::filesystem::path const& path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            throw ingestion_error(path.string());
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    inline nlohmann::json read_json_file(std::filesystem::path const& path)
    {
        auto text = read_text_file(path);
        try {
            return nlohmann::json::parse(text);
        } catch (nlohmann::json::parse_error const& e) {
            throw validation_error(path.string() + ": invalid JSON: " + e.what());
        }
    }

    inline std::vector<std::string> json_id_list(nlohmann::json const& j, std::string const& what)
    {
        if (!j.is_array()) {
            throw validation_error(what + ": expected an array of ids");
        }
        std::vector<std::string> out;
        for (auto const& v : j) {
            if (!v.is_string()) {
                throw validation_error(what + ": non-string id " + v.dump());
            }
            out.push_back(v.get<std::string>());
        }
        return out;
    }

}  // namespace detail

/// Loads `documents/`, `splits.json`, `citations.json` and `candidates.json`
/// under `root` and normalizes every referenced document. Split members
/// without a citations entry get an empty gold set.
inline corpus load_corpus(std::filesystem::path const& root,
    normalization_rules const& rules = normalization_rules::defaults())
{
    namespace fs = std::filesystem;
    corpus out;
    auto& m = out.manifest;

    auto candidates = detail::json_id_list(detail::read_json_file(root / "candidates.json"), "candidates.json");
    std::sort(candidates.begin(), candidates.end());
    if (auto dup = std::adjacent_find(candidates.begin(), candidates.end()); dup != candidates.end()) {
        throw validation_error("candidates.json: duplicate id '" + *dup + "'");
    }
    m.candidate_ids = std::move(candidates);

    auto splits = detail::read_json_file(root / "splits.json");
    if (!splits.is_object()) {
        throw validation_error("splits.json: expected an object");
    }
    auto split_list = [&](char const* key) {
        if (!splits.contains(key)) {
            throw validation_error(std::string("splits.json: missing key '") + key + "'");
        }
        return detail::json_id_list(splits[key], std::string("splits.json/") + key);
    };
    m.splits.train = split_list("train");
    m.splits.validation = split_list("validation");
    m.splits.test = split_list("test");

    std::map<std::string, int> split_count;
    for (auto const* s : {&m.splits.train, &m.splits.validation, &m.splits.test}) {
        std::set<std::string> unique(s->begin(), s->end());
        for (auto const& id : unique) {
            ++split_count[id];
        }
        if (unique.size() != s->size()) {
            throw validation_error("splits.json: duplicate id within a split");
        }
    }
    std::vector<std::string> overlapping;
    for (auto const& [id, n] : split_count) {
        if (n > 1) {
            overlapping.push_back(id);
        }
    }
    if (!overlapping.empty()) {
        throw validation_error("splits.json: ids in more than one split: " + detail::join(overlapping, ", "));
    }

    auto citations = detail::read_json_file(root / "citations.json");
    if (!citations.is_object()) {
        throw validation_error("citations.json: expected an object");
    }
    std::set<std::string> unknown;
    for (auto const& [query, cited] : citations.items()) {
        auto ids = detail::json_id_list(cited, "citations.json/" + query);
        auto& gold = m.gold[query];
        for (auto& id : ids) {
            if (!std::binary_search(m.candidate_ids.begin(), m.candidate_ids.end(), id)) {
                unknown.insert(id);
            }
            gold.insert(std::move(id));
        }
    }
    if (!unknown.empty()) {
        throw validation_error("citations.json: cited ids not in candidates.json: " + detail::join(unknown, ", "));
    }
    for (auto const& [id, n] : split_count) {
        m.gold.try_emplace(id);
    }

    std::set<std::string> needed(m.candidate_ids.begin(), m.candidate_ids.end());
    for (auto const& [id, n] : split_count) {
        needed.insert(id);
    }
    out.documents.reserve(needed.size());
    for (auto const& id : needed) {
        auto raw = detail::read_text_file(root / "documents" / (id + ".txt"));
        out.documents.push_back({id, normalize_text(raw, rules), split_count.count(id) > 0});
    }
    return out;
}

/// Indices of sentences that do not contain a citation marker token.
inline std::vector<std::size_t> citation_free_sentences(parsed_document const& parsed)
{
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < parsed.sentences.size(); ++i) {
        if (!parsed.sentences[i].contains_form(citation_marker)) {
            kept.push_back(i);
        }
    }
    return kept;
}

namespace detail {

    // Start offset of each sentence inside `text`, located by scanning for
    // the token forms in order. Empty when the parse does not align.
    inline std::optional<std::vector<std::size_t>>
    sentence_offsets(std::string_view text, parsed_document const& parsed)
    {
        std::vector<std::size_t> starts;
        std::size_t cursor = 0;
        for (auto const& s : parsed.sentences) {
            std::optional<std::size_t> first;
            for (auto const& t : s.tokens) {
                auto at = text.find(t.form, cursor);
                if (at == std::string_view::npos) {
                    return std::nullopt;
                }
                if (!first) {
                    first = at;
                }
                cursor = at + t.form.size();
            }
            starts.push_back(first.value_or(cursor));
        }
        if (!starts.empty()) {
            starts.front() = 0;
        }
        return starts;
    }

}  // namespace detail

/// Drops every sentence containing a `<CITATION>` token from both views. The
/// text is cut along the parsed sentence boundaries; if the forms cannot be
/// located in the text, the surviving token forms are joined instead.
inline std::pair<normalized_document, parsed_document>
strip_citation_sentences(normalized_document const& doc, parsed_document const& parsed)
{
    auto kept = citation_free_sentences(parsed);

    parsed_document out_parsed{parsed.doc_id, {}};
    for (auto i : kept) {
        out_parsed.sentences.push_back(parsed.sentences[i]);
        out_parsed.sentences.back().sent_index = out_parsed.sentences.size() - 1;
    }

    normalized_document out_doc{doc.doc_id, {}, doc.is_query};
    if (kept.size() == parsed.sentences.size() && doc.text.find(citation_marker) == std::string::npos) {
        out_doc.text = doc.text;
        return {std::move(out_doc), std::move(out_parsed)};
    }
    std::vector<std::string> pieces;
    if (auto starts = detail::sentence_offsets(doc.text, parsed)) {
        for (auto i : kept) {
            auto begin = (*starts)[i];
            auto end = i + 1 < starts->size() ? (*starts)[i + 1] : doc.text.size();
            pieces.emplace_back(detail::trim(std::string_view(doc.text).substr(begin, end - begin)));
        }
    } else {
        for (auto const& s : out_parsed.sentences) {
            std::vector<std::string_view> forms;
            for (auto const& t : s.tokens) {
                forms.push_back(t.form);
            }
            pieces.push_back(detail::join(forms, " "));
        }
    }
    out_doc.text = detail::join(pieces, "\n");
    return {std::move(out_doc), std::move(out_parsed)};
}

}  // namespace ucreat
