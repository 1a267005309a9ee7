#pragma once

// Brute-force reference implementations used only by tests. They follow the
// closed-form definitions directly and share no code with the library's
// scoring or filtering paths.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ucreat/conllu.hpp"
#include "ucreat/events.hpp"
#include "ucreat/retrieval.hpp"

namespace oracle {

using doc_tokens = std::vector<std::string>;

inline double bm25(std::vector<doc_tokens> const& corpus, doc_tokens const& query, std::size_t doc, double k1,
    double b)
{
    double n = static_cast<double>(corpus.size());
    double total = 0.0;
    for (auto const& d : corpus) {
        total += static_cast<double>(d.size());
    }
    double avgdl = total / n;
    std::set<std::string> distinct(query.begin(), query.end());
    double score = 0.0;
    for (auto const& t : distinct) {
        double tf = static_cast<double>(std::count(corpus[doc].begin(), corpus[doc].end(), t));
        if (tf == 0.0) {
            continue;
        }
        double df = 0.0;
        for (auto const& d : corpus) {
            if (std::find(d.begin(), d.end(), t) != d.end()) {
                df += 1.0;
            }
        }
        double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
        double norm = avgdl == 0.0 ? 1.0 : (1.0 - b + b * static_cast<double>(corpus[doc].size()) / avgdl);
        score += idf * tf * (k1 + 1.0) / (tf + k1 * norm);
    }
    return score;
}

inline double tfidf_cosine(std::vector<doc_tokens> const& corpus, doc_tokens const& query, std::size_t doc)
{
    std::set<std::string> vocab;
    for (auto const& d : corpus) {
        vocab.insert(d.begin(), d.end());
    }
    double n = static_cast<double>(corpus.size());
    std::vector<double> qv;
    std::vector<double> dv;
    for (auto const& t : vocab) {
        double df = 0.0;
        for (auto const& d : corpus) {
            df += std::find(d.begin(), d.end(), t) != d.end() ? 1.0 : 0.0;
        }
        double idf = std::log((1.0 + n) / (1.0 + df)) + 1.0;
        qv.push_back(static_cast<double>(std::count(query.begin(), query.end(), t)) * idf);
        dv.push_back(static_cast<double>(std::count(corpus[doc].begin(), corpus[doc].end(), t)) * idf);
    }
    double dot = 0.0;
    double qq = 0.0;
    double dd = 0.0;
    for (std::size_t i = 0; i < qv.size(); ++i) {
        dot += qv[i] * dv[i];
        qq += qv[i] * qv[i];
        dd += dv[i] * dv[i];
    }
    if (qq == 0.0 || dd == 0.0) {
        return 0.0;
    }
    return dot / (std::sqrt(qq) * std::sqrt(dd));
}

inline double jaccard(std::set<std::string> const& a, std::set<std::string> const& b)
{
    std::vector<std::string> inter;
    std::vector<std::string> uni;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(inter));
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(uni));
    return uni.empty() ? 0.0 : static_cast<double>(inter.size()) / static_cast<double>(uni.size());
}

// Lowercased alphanumeric runs of length >= 2; the citation marker is skipped.
inline doc_tokens words(std::string const& text)
{
    doc_tokens out;
    std::string cur;
    std::string clean = text;
    for (std::size_t p; (p = clean.find("<CITATION>")) != std::string::npos;) {
        clean.replace(p, 10, " ");
    }
    for (char c : clean + " ") {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        } else {
            if (cur.size() >= 2) {
                out.push_back(cur);
            }
            cur.clear();
        }
    }
    return out;
}

inline std::string key(ucreat::event const& e)
{
    return e.subject + "|" + e.predicate + "|" + e.dobj + "|" + e.dative + "|" + e.pobj;
}

inline doc_tokens sentence_text_words(ucreat::parsed_sentence const& s)
{
    std::string text;
    for (auto const& t : s.tokens) {
        text += t.form + " ";
    }
    return words(text);
}

// Words of the sentences (of `doc`) emitting an event whose key is in `shared`.
inline doc_tokens filtered_side(ucreat::parsed_document const& doc, ucreat::event_sequence const& events,
    std::set<std::string> const& shared)
{
    doc_tokens out;
    for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
        bool hit = false;
        for (auto const& e : events.events) {
            if (e.sent_index == s && shared.count(key(e)) != 0) {
                hit = true;
            }
        }
        if (hit) {
            auto w = sentence_text_words(doc.sentences[s]);
            out.insert(out.end(), w.begin(), w.end());
        }
    }
    return out;
}

inline std::pair<doc_tokens, doc_tokens> filtered_pair(ucreat::parsed_document const& qd,
    ucreat::event_sequence const& qe, ucreat::parsed_document const& cd, ucreat::event_sequence const& ce)
{
    std::set<std::string> qk;
    std::set<std::string> ck;
    for (auto const& e : qe.events) {
        qk.insert(key(e));
    }
    for (auto const& e : ce.events) {
        ck.insert(key(e));
    }
    std::set<std::string> shared;
    std::set_intersection(qk.begin(), qk.end(), ck.begin(), ck.end(), std::inserter(shared, shared.end()));
    return {filtered_side(qd, qe, shared), filtered_side(cd, ce, shared)};
}

inline doc_tokens ngrams(doc_tokens const& in, std::size_t n, bool cumulative)
{
    doc_tokens out;
    for (std::size_t k = cumulative ? 1 : n; k <= n; ++k) {
        for (std::size_t i = 0; i + k <= in.size(); ++i) {
            std::string g;
            for (std::size_t j = 0; j < k; ++j) {
                g += (j ? "\x1f" : "") + in[i + j];
            }
            out.push_back(g);
        }
    }
    return out;
}

struct scored {
    std::string id;
    double score;
};

inline std::vector<scored> sorted(std::vector<scored> v)
{
    std::sort(v.begin(), v.end(), [](scored const& a, scored const& b) {
        return a.score != b.score ? a.score > b.score : a.id < b.id;
    });
    return v;
}

/// Event-filtered ranking: filter each pair, index the filtered candidates
/// of this query, score each against its own filtered query.
inline std::vector<scored> filtered_rank(ucreat::parsed_document const& q, ucreat::event_sequence const& qe,
    std::vector<ucreat::parsed_document> const& cands, std::vector<ucreat::event_sequence> const& ce, std::size_t n,
    bool cumulative, double k1, double b)
{
    std::vector<doc_tokens> corpus;
    std::vector<doc_tokens> queries;
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < cands.size(); ++i) {
        if (cands[i].doc_id == q.doc_id) {
            continue;
        }
        auto [qq, cc] = filtered_pair(q, qe, cands[i], ce[i]);
        queries.push_back(ngrams(qq, n, cumulative));
        corpus.push_back(ngrams(cc, n, cumulative));
        ids.push_back(cands[i].doc_id);
    }
    std::vector<scored> out;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        out.push_back({ids[i], bm25(corpus, queries[i], i, k1, b)});
    }
    return sorted(out);
}

/// Macro-averaged F1@K (per-query P/R averaged). Used to show the
/// micro-averaged implementation differs from it.
inline double macro_f1(std::vector<ucreat::ranked_list> const& rankings, ucreat::gold_citations const& gold,
    std::size_t k)
{
    double p_sum = 0.0;
    double r_sum = 0.0;
    for (auto const& r : rankings) {
        auto const& g = gold.at(r.query_id);
        std::size_t top = std::min(k, r.entries.size());
        double hits = 0.0;
        for (std::size_t i = 0; i < top; ++i) {
            hits += g.count(r.entries[i].candidate_id);
        }
        p_sum += top ? hits / static_cast<double>(top) : 0.0;
        r_sum += g.empty() ? 0.0 : hits / static_cast<double>(g.size());
    }
    double p = p_sum / static_cast<double>(rankings.size());
    double r = r_sum / static_cast<double>(rankings.size());
    return p + r == 0.0 ? 0.0 : 2 * p * r / (p + r);
}

}  // namespace oracle
