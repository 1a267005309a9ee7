#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ucreat/conllu.hpp"
#include "ucreat/detail/text.hpp"

namespace ucreat {

/// A predicate lemma with its main arguments. Empty strings mark absent slots.
struct event {
    std::string predicate;
    std::string subject;
    std::string dobj;
    std::string dative;
    std::string pobj;
    std::size_t sent_index = 0;
    std::uint32_t verb_index = 0;

    bool has_arguments() const noexcept
    {
        return !subject.empty() || !dobj.empty() || !dative.empty() || !pobj.empty();
    }

    bool operator==(event const&) const = default;
};

struct event_sequence {
    std::string doc_id;
    std::vector<event> events;

    bool operator==(event_sequence const&) const = default;
};

/// Identity of an event as an atomic unit: `subject|predicate|dobj|dative|pobj`.
/// Source position is not part of the key.
inline std::string canonical_key(event const& e)
{
    std::string key;
    key.reserve(e.subject.size() + e.predicate.size() + e.dobj.size() + e.dative.size() + e.pobj.size() + 4);
    key += e.subject;
    key += '|';
    key += e.predicate;
    key += '|';
    key += e.dobj;
    key += '|';
    key += e.dative;
    key += '|';
    key += e.pobj;
    return key;
}

enum class argument_role { subject, dobj, dative, pobj };

struct argument_phrase {
    argument_role role;
    std::string text;           // lowercased lemmas joined by single spaces
    std::uint32_t head_index;   // token carrying the relation (or its conjunct)

    bool operator==(argument_phrase const&) const = default;
};

struct extraction_options {
    /// Cartesian expansion cap per verb; the earliest combinations are kept.
    std::size_t max_events_per_verb = 16;
    /// When false, `<CITATION>` tokens never become argument words.
    bool keep_citation_marker = false;
    /// Maps (lowercased) parser relation labels onto the labels used here,
    /// e.g. {"obj": "dobj", "obl": "pobj"}. Unmapped labels pass through.
    std::map<std::string, std::string> label_map;
};

namespace detail {

    inline std::string relation(parsed_token const& t, extraction_options const& opts)
    {
        auto rel = to_lower(t.deprel);
        if (auto it = opts.label_map.find(rel); it != opts.label_map.end()) {
            return it->second;
        }
        return rel;
    }

    inline std::string lemma_of(parsed_token const& t)
    {
        if (t.lemma.empty() || t.lemma == "_") {
            return to_lower(t.form);
        }
        return to_lower(t.lemma);
    }

    inline bool usable(parsed_token const& t, extraction_options const& opts)
    {
        return opts.keep_citation_marker || t.form != citation_marker;
    }

    // Compound dependents of `head` merged with it in surface order.
    inline std::string phrase_of(parsed_sentence const& s, parsed_token const& head, extraction_options const& opts)
    {
        std::vector<std::string> words;
        for (auto const& t : s.tokens) {
            bool part = t.index == head.index
                || (t.head == head.index && relation(t, opts) == "compound" && usable(t, opts));
            if (part) {
                auto w = lemma_of(t);
                if (!w.empty()) {
                    words.push_back(std::move(w));
                }
            }
        }
        return join(words, " ");
    }

    // The argument itself plus its direct conjuncts.
    inline void expand_argument(parsed_sentence const& s, parsed_token const& arg, argument_role role,
        extraction_options const& opts, std::vector<argument_phrase>& out)
    {
        auto emit = [&](parsed_token const& head) {
            if (!usable(head, opts)) {
                return;
            }
            auto text = phrase_of(s, head, opts);
            if (!text.empty()) {
                out.push_back({role, std::move(text), head.index});
            }
        };
        emit(arg);
        for (auto const& t : s.tokens) {
            if (t.head == arg.index && relation(t, opts) == "conj") {
                emit(t);
            }
        }
    }

}  // namespace detail

/// Role-qualified argument phrases of a verb on one side, in token order.
/// Left: nsubj / nsubjpass / csubj. Right: dobj / dative / pobj, plus the
/// pobj dependents of a prep child (one level).
inline std::vector<argument_phrase> collect_arguments(parsed_sentence const& sentence, std::uint32_t verb_index,
    side which, extraction_options const& opts = {})
{
    std::vector<argument_phrase> out;
    for (auto const* child : children(sentence, verb_index, which)) {
        auto rel = detail::relation(*child, opts);
        if (which == side::left) {
            if (rel == "nsubj" || rel == "nsubjpass" || rel == "csubj") {
                detail::expand_argument(sentence, *child, argument_role::subject, opts, out);
            }
            continue;
        }
        if (rel == "dobj") {
            detail::expand_argument(sentence, *child, argument_role::dobj, opts, out);
        } else if (rel == "dative") {
            detail::expand_argument(sentence, *child, argument_role::dative, opts, out);
        } else if (rel == "pobj") {
            detail::expand_argument(sentence, *child, argument_role::pobj, opts, out);
        } else if (rel == "prep") {
            for (auto const& t : sentence.tokens) {
                if (t.head == child->index && detail::relation(t, opts) == "pobj") {
                    detail::expand_argument(sentence, t, argument_role::pobj, opts, out);
                }
            }
        }
    }
    std::stable_sort(out.begin(), out.end(),
        [](argument_phrase const& a, argument_phrase const& b) { return a.head_index < b.head_index; });
    return out;
}

/// Events of one sentence, in verb order then expansion order.
inline void extract_sentence_events(parsed_sentence const& sentence, extraction_options const& opts,
    std::vector<event>& out)
{
    for (auto const& verb : sentence.tokens) {
        if (!detail::iequals(verb.upos, "VERB")) {
            continue;
        }
        auto predicate = detail::lemma_of(verb);
        if (predicate.empty()) {
            continue;  // incomplete event
        }

        // slot lists: subject, dobj, dative, pobj
        std::array<std::vector<std::string>, 4> slots;
        for (auto const& a : collect_arguments(sentence, verb.index, side::left, opts)) {
            slots[0].push_back(a.text);
        }
        for (auto const& a : collect_arguments(sentence, verb.index, side::right, opts)) {
            slots[static_cast<std::size_t>(a.role)].push_back(a.text);
        }
        if (std::all_of(slots.begin(), slots.end(), [](auto const& s) { return s.empty(); })) {
            continue;  // empty event
        }
        for (auto& s : slots) {
            if (s.empty()) {
                s.emplace_back();
            }
        }

        // Mixed-radix enumeration, pobj varying fastest, so a larger cap only
        // appends combinations.
        std::size_t total = 1;
        for (auto const& s : slots) {
            total *= s.size();
        }
        total = std::min(total, opts.max_events_per_verb);
        for (std::size_t k = 0; k < total; ++k) {
            std::array<std::size_t, 4> pick{};
            auto rest = k;
            for (std::size_t slot = 4; slot-- > 0;) {
                pick[slot] = rest % slots[slot].size();
                rest /= slots[slot].size();
            }
            out.push_back({predicate, slots[0][pick[0]], slots[1][pick[1]], slots[2][pick[2]], slots[3][pick[3]],
                sentence.sent_index, verb.index});
        }
    }
}

inline event_sequence extract_events(parsed_document const& doc, extraction_options const& opts = {})
{
    event_sequence seq{doc.doc_id, {}};
    for (auto const& s : doc.sentences) {
        extract_sentence_events(s, opts, seq.events);
    }
    return seq;
}

inline nlohmann::json to_json(event const& e)
{
    return {
        {"predicate", e.predicate},
        {"subject", e.subject},
        {"dobj", e.dobj},
        {"dative", e.dative},
        {"pobj", e.pobj},
        {"sent_index", e.sent_index},
        {"verb_index", e.verb_index},
    };
}

/// Throws nlohmann::json::exception on missing or mistyped fields.
inline event event_from_json(nlohmann::json const& j)
{
    event e;
    e.predicate = j.at("predicate").get<std::string>();
    e.subject = j.at("subject").get<std::string>();
    e.dobj = j.at("dobj").get<std::string>();
    e.dative = j.at("dative").get<std::string>();
    e.pobj = j.at("pobj").get<std::string>();
    e.sent_index = j.at("sent_index").get<std::size_t>();
    e.verb_index = j.at("verb_index").get<std::uint32_t>();
    return e;
}

}  // namespace ucreat
