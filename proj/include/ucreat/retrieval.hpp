#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ucreat/error.hpp"
#include "ucreat/representations.hpp"

namespace ucreat {

enum class scorer { bm25, tfidf_cosine, jaccard };

inline std::string_view to_string(scorer s) noexcept
{
    switch (s) {
    case scorer::bm25: return "bm25";
    case scorer::tfidf_cosine: return "tfidf_cosine";
    case scorer::jaccard: return "jaccard";
    }
    return "unknown";
}

inline std::optional<scorer> parse_scorer(std::string_view name) noexcept
{
    for (auto s : {scorer::bm25, scorer::tfidf_cosine, scorer::jaccard}) {
        if (to_string(s) == name) {
            return s;
        }
    }
    return std::nullopt;
}

/// Okapi BM25 free parameters.
struct bm25_params {
    double k1 = 1.5;
    double b = 0.75;
};

/// Corpus statistics for BM25 and TF-IDF scoring. Immutable once built.
///
/// Term frequencies are stored per document as (term id, tf) pairs sorted by
/// term id; scoring walks the query's distinct term ids in ascending order,
/// so every score is computed with the same summation order.
class bm25_index {
  public:
    using term_id = std::uint32_t;

    /// Query terms resolved against the vocabulary: distinct in-vocabulary
    /// term ids in ascending order with their query-side counts.
    struct resolved_query {
        std::vector<std::pair<term_id, std::uint32_t>> terms;
    };

    static bm25_index build(std::span<token_stream const> streams, bm25_params params = {})
    {
        if (streams.empty()) {
            throw error("cannot build an index over zero documents");
        }
        bm25_index idx;
        idx.m_params = params;
        idx.m_doc_ids.reserve(streams.size());
        idx.m_doc_terms.reserve(streams.size());
        std::uint64_t total_len = 0;
        for (auto const& s : streams) {
            if (!idx.m_doc_slot.emplace(s.doc_id, idx.m_doc_ids.size()).second) {
                throw error("duplicate document '" + s.doc_id + "' in index");
            }
            idx.m_doc_ids.push_back(s.doc_id);
            std::unordered_map<term_id, std::uint32_t> counts;
            for (auto const& tok : s.tokens) {
                auto [it, inserted] = idx.m_term_ids.try_emplace(tok, static_cast<term_id>(idx.m_df.size()));
                if (inserted) {
                    idx.m_df.push_back(0);
                }
                ++counts[it->second];
            }
            std::vector<std::pair<term_id, std::uint32_t>> terms(counts.begin(), counts.end());
            std::sort(terms.begin(), terms.end());
            for (auto const& [t, tf] : terms) {
                ++idx.m_df[t];
            }
            idx.m_doc_terms.push_back(std::move(terms));
            idx.m_doc_len.push_back(static_cast<std::uint32_t>(s.tokens.size()));
            total_len += s.tokens.size();
        }
        idx.m_avgdl = static_cast<double>(total_len) / static_cast<double>(streams.size());

        idx.m_tfidf_norm.reserve(streams.size());
        for (auto const& terms : idx.m_doc_terms) {
            double sq = 0.0;
            for (auto const& [t, tf] : terms) {
                double w = tf * idx.smooth_idf(t);
                sq += w * w;
            }
            idx.m_tfidf_norm.push_back(std::sqrt(sq));
        }
        return idx;
    }

    std::size_t size() const noexcept { return m_doc_ids.size(); }
    double avgdl() const noexcept { return m_avgdl; }
    bm25_params params() const noexcept { return m_params; }
    std::size_t vocabulary_size() const noexcept { return m_df.size(); }
    std::vector<std::string> const& doc_ids() const noexcept { return m_doc_ids; }

    std::optional<std::size_t> slot(std::string_view doc_id) const
    {
        auto it = m_doc_slot.find(std::string(doc_id));
        if (it == m_doc_slot.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    std::size_t require_slot(std::string_view doc_id) const
    {
        if (auto s = slot(doc_id)) {
            return *s;
        }
        throw lookup_error("document '" + std::string(doc_id) + "' is not indexed");
    }

    std::optional<term_id> term(std::string_view token) const
    {
        auto it = m_term_ids.find(std::string(token));
        if (it == m_term_ids.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    std::uint32_t df(std::string_view token) const
    {
        auto t = term(token);
        return t ? m_df[*t] : 0;
    }

    std::uint32_t doc_len(std::string_view doc_id) const { return m_doc_len[require_slot(doc_id)]; }

    std::uint32_t tf(std::string_view doc_id, std::string_view token) const
    {
        auto t = term(token);
        return t ? tf_at(require_slot(doc_id), *t) : 0;
    }

    resolved_query resolve(std::span<std::string const> tokens) const
    {
        std::unordered_map<term_id, std::uint32_t> counts;
        for (auto const& tok : tokens) {
            if (auto t = term(tok)) {
                ++counts[*t];
            }
        }
        resolved_query q;
        q.terms.assign(counts.begin(), counts.end());
        std::sort(q.terms.begin(), q.terms.end());
        return q;
    }

    /// ln(1 + (N - df + 0.5) / (df + 0.5)); always positive.
    double bm25_idf(term_id t) const
    {
        double n = static_cast<double>(size());
        double df = m_df[t];
        return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
    }

    /// ln((1 + N) / (1 + df)) + 1
    double smooth_idf(term_id t) const
    {
        return std::log((1.0 + static_cast<double>(size())) / (1.0 + m_df[t])) + 1.0;
    }

    /// Sums over distinct query terms; query-side frequency is ignored.
    double bm25(std::size_t doc_slot, resolved_query const& q) const
    {
        auto const k1 = m_params.k1;
        auto const b = m_params.b;
        double len_factor = m_avgdl > 0.0 ? 1.0 - b + b * m_doc_len[doc_slot] / m_avgdl : 1.0;
        double score = 0.0;
        for (auto const& [t, qtf] : q.terms) {
            auto tf = tf_at(doc_slot, t);
            if (tf == 0) {
                continue;
            }
            score += bm25_idf(t) * (tf * (k1 + 1.0)) / (tf + k1 * len_factor);
        }
        return score;
    }

    /// Cosine of raw-tf x smooth-idf vectors. Out-of-vocabulary query terms
    /// do not contribute to the query norm.
    double tfidf_cosine(std::size_t doc_slot, resolved_query const& q) const
    {
        double dnorm = m_tfidf_norm[doc_slot];
        if (dnorm == 0.0 || q.terms.empty()) {
            return 0.0;
        }
        double dot = 0.0;
        double qsq = 0.0;
        for (auto const& [t, qtf] : q.terms) {
            double idf = smooth_idf(t);
            double qw = qtf * idf;
            qsq += qw * qw;
            if (auto tf = tf_at(doc_slot, t)) {
                dot += qw * tf * idf;
            }
        }
        // Clamp rounding above 1 for identical documents.
        return std::min(1.0, dot / (std::sqrt(qsq) * dnorm));
    }

  private:
    std::uint32_t tf_at(std::size_t doc_slot, term_id t) const
    {
        auto const& terms = m_doc_terms[doc_slot];
        auto it = std::lower_bound(terms.begin(), terms.end(), t,
            [](auto const& entry, term_id value) { return entry.first < value; });
        return it != terms.end() && it->first == t ? it->second : 0;
    }

    bm25_params m_params;
    std::unordered_map<std::string, term_id> m_term_ids;
    std::vector<std::uint32_t> m_df;
    std::vector<std::string> m_doc_ids;
    std::unordered_map<std::string, std::size_t> m_doc_slot;
    std::vector<std::vector<std::pair<term_id, std::uint32_t>>> m_doc_terms;
    std::vector<std::uint32_t> m_doc_len;
    std::vector<double> m_tfidf_norm;
    double m_avgdl = 0.0;
};

inline bm25_index build_index(std::span<token_stream const> streams, bm25_params params = {})
{
    return bm25_index::build(streams, params);
}

inline double bm25_score(bm25_index const& index, std::span<std::string const> query_tokens, std::string_view doc_id)
{
    auto slot = index.require_slot(doc_id);
    return index.bm25(slot, index.resolve(query_tokens));
}

inline double tfidf_cosine_score(bm25_index const& index, std::span<std::string const> query_tokens,
    std::string_view doc_id)
{
    auto slot = index.require_slot(doc_id);
    return index.tfidf_cosine(slot, index.resolve(query_tokens));
}

/// |a ∩ b| / |a ∪ b|; two empty sets score 0.
template <typename Set>
double jaccard_score(Set const& a, Set const& b)
{
    auto const& small = a.size() <= b.size() ? a : b;
    auto const& large = a.size() <= b.size() ? b : a;
    std::size_t common = 0;
    for (auto const& x : small) {
        common += large.count(x) != 0 ? 1 : 0;
    }
    auto united = a.size() + b.size() - common;
    return united == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(united);
}

struct ranked_entry {
    std::string candidate_id;
    double score = 0.0;

    bool operator==(ranked_entry const&) const = default;
};

/// Candidates sorted by score descending, ties by candidate id ascending.
struct ranked_list {
    std::string query_id;
    std::vector<ranked_entry> entries;

    bool operator==(ranked_list const&) const = default;
};

inline void sort_entries(std::vector<ranked_entry>& entries)
{
    std::sort(entries.begin(), entries.end(), [](ranked_entry const& x, ranked_entry const& y) {
        if (x.score != y.score) {
            return x.score > y.score;
        }
        return x.candidate_id < y.candidate_id;
    });
}

namespace detail {

    inline std::vector<std::string const*> pool_without(std::span<std::string const> pool, std::string_view query_id)
    {
        std::vector<std::string const*> out;
        out.reserve(pool.size());
        for (auto const& id : pool) {
            if (id != query_id) {
                out.push_back(&id);
            }
        }
        if (out.empty()) {
            throw error("empty candidate pool for query '" + std::string(query_id) + "'");
        }
        return out;
    }

}  // namespace detail

/// Scores every pool member except the query itself with BM25 or TF-IDF
/// cosine.
inline ranked_list rank(bm25_index const& index, std::span<std::string const> query_tokens,
    std::span<std::string const> pool, std::string_view query_id, scorer kind = scorer::bm25)
{
    if (kind == scorer::jaccard) {
        throw config_error("jaccard ranking takes event key sets, not an index");
    }
    auto members = detail::pool_without(pool, query_id);
    auto q = index.resolve(query_tokens);
    ranked_list out{std::string(query_id), {}};
    out.entries.reserve(members.size());
    for (auto const* id : members) {
        auto slot = index.require_slot(*id);
        double s = kind == scorer::bm25 ? index.bm25(slot, q) : index.tfidf_cosine(slot, q);
        out.entries.push_back({*id, s});
    }
    sort_entries(out.entries);
    return out;
}

using key_set = std::set<std::string>;

inline key_set event_key_set(event_sequence const& events)
{
    key_set keys;
    for (auto const& e : events.events) {
        keys.insert(canonical_key(e));
    }
    return keys;
}

/// Jaccard ranking over canonical event key sets. `candidate_keys` maps
/// candidate id to its key set.
template <typename KeyMap>
ranked_list rank_jaccard(key_set const& query_keys, KeyMap const& candidate_keys, std::span<std::string const> pool,
    std::string_view query_id)
{
    auto members = detail::pool_without(pool, query_id);
    ranked_list out{std::string(query_id), {}};
    out.entries.reserve(members.size());
    for (auto const* id : members) {
        auto it = candidate_keys.find(*id);
        if (it == candidate_keys.end()) {
            throw lookup_error("no events for candidate '" + *id + "'");
        }
        out.entries.push_back({*id, jaccard_score(query_keys, it->second)});
    }
    sort_entries(out.entries);
    return out;
}

/// Parameters of the per-query event-filtered regime.
struct filtered_rank_params {
    scorer kind = scorer::bm25;
    std::size_t ngram_order = 1;
    bool cumulative = true;
    bm25_params bm25;
};

/// Event-filtered ranking for one query. Each candidate is reduced to the
/// sentences sharing events with the query (and the query to the matching
/// sentences); the reduced candidates form a per-query index, and each is
/// scored against its own reduced query.
template <typename ProfileMap>
ranked_list pairwise_filtered_rank(event_profile const& query, ProfileMap const& candidates,
    std::span<std::string const> pool, filtered_rank_params const& params)
{
    if (params.kind == scorer::jaccard) {
        throw config_error("event_filtered ranking requires bm25 or tfidf_cosine");
    }
    auto members = detail::pool_without(pool, query.doc_id);
    std::vector<token_stream> docs;
    std::vector<std::vector<std::string>> queries;
    docs.reserve(members.size());
    queries.reserve(members.size());
    for (auto const* id : members) {
        auto it = candidates.find(*id);
        if (it == candidates.end()) {
            throw lookup_error("no event profile for candidate '" + *id + "'");
        }
        auto [q, c] = event_filtered_pair(query, it->second);
        queries.push_back(ngrams(q.tokens, params.ngram_order, params.cumulative));
        docs.push_back(ngrams(c, params.ngram_order, params.cumulative));
    }
    auto index = bm25_index::build(docs, params.bm25);
    ranked_list out{query.doc_id, {}};
    out.entries.reserve(members.size());
    for (std::size_t i = 0; i < members.size(); ++i) {
        auto q = index.resolve(queries[i]);
        double s = params.kind == scorer::bm25 ? index.bm25(i, q) : index.tfidf_cosine(i, q);
        out.entries.push_back({*members[i], s});
    }
    sort_entries(out.entries);
    return out;
}

}  // namespace ucreat
