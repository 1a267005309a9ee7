#pragma once

#include <algorithm>
#include <chrono>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ucreat/corpus.hpp"
#include "ucreat/error.hpp"
#include "ucreat/retrieval.hpp"

namespace ucreat {

struct metrics_point {
    std::size_t k = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;

    bool operator==(metrics_point const&) const = default;
};

inline double f1_score(double precision, double recall) noexcept
{
    double sum = precision + recall;
    return sum == 0.0 ? 0.0 : 2.0 * precision * recall / sum;
}

/// Raw counts behind a micro-averaged point.
struct micro_counts {
    std::size_t correct = 0;
    std::size_t retrieved = 0;
    std::size_t relevant = 0;
};

inline micro_counts count_hits(std::span<ranked_list const> rankings, gold_citations const& gold, std::size_t k)
{
    micro_counts c;
    for (auto const& r : rankings) {
        auto g = gold.find(r.query_id);
        if (g == gold.end()) {
            throw validation_error("no gold citations for query '" + r.query_id + "'");
        }
        auto top = std::min(k, r.entries.size());
        c.retrieved += top;
        c.relevant += g->second.size();
        for (std::size_t i = 0; i < top; ++i) {
            c.correct += g->second.count(r.entries[i].candidate_id);
        }
    }
    return c;
}

/// Micro-averaged precision, recall and F1 over the top-k of every ranking:
/// hits, retrieved and relevant counts are summed over queries before
/// dividing. A query with fewer than k candidates retrieves all of them.
inline metrics_point micro_metrics(std::span<ranked_list const> rankings, gold_citations const& gold, std::size_t k)
{
    if (k == 0) {
        throw config_error("K must be >= 1");
    }
    auto c = count_hits(rankings, gold, k);
    metrics_point p{k, 0.0, 0.0, 0.0};
    if (c.retrieved > 0) {
        p.precision = static_cast<double>(c.correct) / static_cast<double>(c.retrieved);
    }
    if (c.relevant > 0) {
        p.recall = static_cast<double>(c.correct) / static_cast<double>(c.relevant);
    }
    p.f1 = f1_score(p.precision, p.recall);
    return p;
}

/// Inclusive K range.
struct k_range {
    std::size_t min = 1;
    std::size_t max = 20;

    std::vector<std::size_t> values() const
    {
        if (min == 0 || max < min) {
            throw config_error("invalid K range [" + std::to_string(min) + ", " + std::to_string(max) + "]");
        }
        std::vector<std::size_t> out;
        for (auto k = min; k <= max; ++k) {
            out.push_back(k);
        }
        return out;
    }
};

inline std::vector<metrics_point> sweep_k(std::span<ranked_list const> rankings, gold_citations const& gold,
    std::span<std::size_t const> ks)
{
    if (ks.empty()) {
        throw config_error("empty K range");
    }
    std::vector<metrics_point> curve;
    curve.reserve(ks.size());
    for (auto k : ks) {
        curve.push_back(micro_metrics(rankings, gold, k));
    }
    return curve;
}

/// Arg-max of F1; the smallest K wins ties.
inline std::size_t select_k(std::span<metrics_point const> curve)
{
    if (curve.empty()) {
        throw config_error("cannot select K from an empty curve");
    }
    auto best = curve.front();
    for (auto const& p : curve) {
        if (p.f1 > best.f1 || (p.f1 == best.f1 && p.k < best.k)) {
            best = p;
        }
    }
    return best.k;
}

struct metrics_report {
    std::map<std::string, std::vector<metrics_point>> curves;  // by split name
    std::size_t selected_k = 0;
    metrics_point test_point;
};

/// Picks K* on the validation curve and reports the test split at K*.
/// Every split present in `by_split` gets a curve.
inline metrics_report evaluate_run(std::map<std::string, std::vector<ranked_list>> const& by_split,
    gold_citations const& gold, std::span<std::size_t const> ks)
{
    if (!by_split.contains("validation") || !by_split.contains("test")) {
        throw config_error("evaluation needs validation and test rankings");
    }
    metrics_report report;
    for (auto const& [split, rankings] : by_split) {
        report.curves[split] = sweep_k(rankings, gold, ks);
    }
    report.selected_k = select_k(report.curves.at("validation"));
    report.test_point = micro_metrics(by_split.at("test"), gold, report.selected_k);
    return report;
}

inline nlohmann::json to_json(metrics_point const& p)
{
    return {{"K", p.k}, {"precision", p.precision}, {"recall", p.recall}, {"f1", p.f1}};
}

/// Wall-clock seconds per pipeline stage. Disk I/O is excluded.
struct timing_report {
    double representation = 0.0;
    double event_extraction = 0.0;
    double index_build = 0.0;
    double scoring = 0.0;
    double total = 0.0;
    std::size_t workers = 1;
    std::size_t query_count = 0;

    double stage_sum() const noexcept { return representation + event_extraction + index_build + scoring; }
};

inline nlohmann::json to_json(timing_report const& t)
{
    return {
        {"representation_seconds", t.representation},
        {"event_extraction_seconds", t.event_extraction},
        {"index_build_seconds", t.index_build},
        {"scoring_seconds", t.scoring},
        {"total_seconds", t.total},
        {"workers", t.workers},
        {"query_count", t.query_count},
    };
}

class stopwatch {
  public:
    stopwatch() : m_start(clock::now()) {}

    double seconds() const { return std::chrono::duration<double>(clock::now() - m_start).count(); }

    double lap()
    {
        auto now = clock::now();
        double s = std::chrono::duration<double>(now - m_start).count();
        m_start = now;
        return s;
    }

  private:
    using clock = std::chrono::steady_clock;
    clock::time_point m_start;
};

}  // namespace ucreat
