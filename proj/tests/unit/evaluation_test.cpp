#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "ucreat/evaluation.hpp"

using namespace ucreat;

namespace {

ranked_list ranking(std::string q, std::vector<std::string> ids)
{
    ranked_list r{std::move(q), {}};
    double s = static_cast<double>(ids.size());
    for (auto& id : ids) {
        r.entries.push_back({std::move(id), s});
        s -= 1.0;
    }
    return r;
}

// Hand-counted micro metrics straight from the definition.
metrics_point by_hand(std::vector<ranked_list> const& rs, gold_citations const& gold, std::size_t k)
{
    double hits = 0, retrieved = 0, relevant = 0;
    for (auto const& r : rs) {
        for (std::size_t i = 0; i < r.entries.size() && i < k; ++i) {
            retrieved += 1;
            hits += gold.at(r.query_id).count(r.entries[i].candidate_id);
        }
        relevant += static_cast<double>(gold.at(r.query_id).size());
    }
    metrics_point p{k, retrieved ? hits / retrieved : 0.0, relevant ? hits / relevant : 0.0, 0.0};
    p.f1 = p.precision + p.recall > 0 ? 2 * p.precision * p.recall / (p.precision + p.recall) : 0.0;
    return p;
}

struct random_run {
    std::vector<ranked_list> rankings;
    gold_citations gold;
};

random_run make_random_run(std::mt19937& rng)
{
    random_run run;
    auto queries = std::uniform_int_distribution<int>(1, 8)(rng);
    auto pool = std::uniform_int_distribution<int>(1, 25)(rng);
    for (int q = 0; q < queries; ++q) {
        std::vector<std::string> ids;
        for (int c = 0; c < pool; ++c) {
            ids.push_back("c" + std::to_string(c));
        }
        std::shuffle(ids.begin(), ids.end(), rng);
        auto qid = "q" + std::to_string(q);
        auto& g = run.gold[qid];
        auto n_gold = std::uniform_int_distribution<int>(0, 6)(rng);
        for (int i = 0; i < n_gold; ++i) {
            g.insert("c" + std::to_string(std::uniform_int_distribution<int>(0, pool + 3)(rng)));
        }
        run.rankings.push_back(ranking(qid, ids));
    }
    return run;
}

}  // namespace

TEST(micro_metrics, two_query_example)
{
    std::vector<ranked_list> rs{ranking("q1", {"a", "b", "x"}), ranking("q2", {"c", "y", "z"})};
    gold_citations gold{{"q1", {"a", "b"}}, {"q2", {"c", "d", "e"}}};
    auto p = micro_metrics(rs, gold, 2);
    EXPECT_DOUBLE_EQ(p.precision, 0.75);
    EXPECT_DOUBLE_EQ(p.recall, 0.6);
    EXPECT_NEAR(p.f1, 2 * 0.75 * 0.6 / 1.35, 1e-12);
    EXPECT_NEAR(p.f1, 0.6667, 1e-4);
}

TEST(micro_metrics, perfect_ranking)
{
    std::vector<ranked_list> rs{ranking("q1", {"a", "b", "x"}), ranking("q2", {"c", "d", "z"})};
    gold_citations gold{{"q1", {"a", "b"}}, {"q2", {"c", "d"}}};
    auto p = micro_metrics(rs, gold, 2);
    EXPECT_EQ(p.precision, 1.0);
    EXPECT_EQ(p.recall, 1.0);
    EXPECT_EQ(p.f1, 1.0);
}

TEST(micro_metrics, reported_f1_from_precision_and_recall)
{
    EXPECT_NEAR(f1_score(0.3512, 0.3328), 0.3417, 5e-4);
    EXPECT_EQ(f1_score(0.0, 0.0), 0.0);
}

TEST(micro_metrics, single_query_precision_halves)
{
    std::vector<ranked_list> rs{ranking("q", {"g", "x", "y"})};
    gold_citations gold{{"q", {"g"}}};
    EXPECT_EQ(micro_metrics(rs, gold, 1).precision, 1.0);
    EXPECT_EQ(micro_metrics(rs, gold, 2).precision, 0.5);
    EXPECT_EQ(micro_metrics(rs, gold, 2).recall, 1.0);
}

TEST(micro_metrics, empty_gold_and_errors)
{
    std::vector<ranked_list> rs{ranking("q", {"a", "b"})};
    gold_citations empty{{"q", {}}};
    auto p = micro_metrics(rs, empty, 2);
    EXPECT_EQ(p.recall, 0.0);
    EXPECT_EQ(p.precision, 0.0);
    EXPECT_EQ(p.f1, 0.0);

    gold_citations missing{{"other", {"a"}}};
    EXPECT_THROW(micro_metrics(rs, missing, 1), validation_error);
    EXPECT_THROW(micro_metrics(rs, empty, 0), config_error);
}

TEST(micro_metrics, short_rankings_retrieve_what_they_have)
{
    std::vector<ranked_list> rs{ranking("q", {"a"})};
    gold_citations gold{{"q", {"a", "b"}}};
    auto p = micro_metrics(rs, gold, 5);
    EXPECT_EQ(p.precision, 1.0);
    EXPECT_EQ(p.recall, 0.5);
}

TEST(micro_metrics, differs_from_macro_average)
{
    std::vector<ranked_list> rs{ranking("q1", {"a", "x"}), ranking("q2", {"y", "z"})};
    gold_citations gold{{"q1", {"a"}}, {"q2", {"b", "c", "d", "e", "f", "g", "h", "i"}}};
    auto micro = micro_metrics(rs, gold, 2).f1;
    auto macro = oracle::macro_f1(rs, gold, 2);
    EXPECT_GT(std::abs(micro - macro), 0.05);
}

TEST(micro_metrics, matches_hand_count_on_random_runs)
{
    std::mt19937 rng(53);
    for (int trial = 0; trial < 200; ++trial) {
        auto run = make_random_run(rng);
        for (std::size_t k = 1; k <= 20; ++k) {
            auto got = micro_metrics(run.rankings, run.gold, k);
            auto want = by_hand(run.rankings, run.gold, k);
            EXPECT_NEAR(got.precision, want.precision, 1e-12);
            EXPECT_NEAR(got.recall, want.recall, 1e-12);
            EXPECT_NEAR(got.f1, want.f1, 1e-12);
            EXPECT_GE(got.f1, 0.0);
            EXPECT_LE(got.f1, 1.0);
            EXPECT_GE(got.f1, std::min(got.precision, got.recall) - 1e-12);
            EXPECT_LE(got.f1, std::max(got.precision, got.recall) + 1e-12);
        }
    }
}

TEST(sweep_k, recall_never_decreases)
{
    std::mt19937 rng(59);
    auto ks = k_range{}.values();
    for (int trial = 0; trial < 100; ++trial) {
        auto run = make_random_run(rng);
        auto curve = sweep_k(run.rankings, run.gold, ks);
        ASSERT_EQ(curve.size(), 20u);
        for (std::size_t i = 1; i < curve.size(); ++i) {
            EXPECT_GE(curve[i].recall, curve[i - 1].recall);
            EXPECT_EQ(curve[i].k, curve[i - 1].k + 1);
        }
    }
}

// Shuffling whole queries, or duplicating every query, leaves micro metrics
// unchanged.
TEST(sweep_k, invariant_to_order_and_replication)
{
    std::mt19937 rng(61);
    for (int trial = 0; trial < 50; ++trial) {
        auto run = make_random_run(rng);
        auto shuffled = run.rankings;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        for (std::size_t k : {1u, 3u, 10u}) {
            EXPECT_EQ(micro_metrics(run.rankings, run.gold, k), micro_metrics(shuffled, run.gold, k));
        }
        std::vector<ranked_list> twice = run.rankings;
        gold_citations gold2 = run.gold;
        for (auto const& r : run.rankings) {
            auto copy = r;
            copy.query_id += "_copy";
            gold2[copy.query_id] = run.gold.at(r.query_id);
            twice.push_back(copy);
        }
        for (std::size_t k : {1u, 3u, 10u}) {
            auto a = micro_metrics(run.rankings, run.gold, k);
            auto b = micro_metrics(twice, gold2, k);
            EXPECT_NEAR(a.precision, b.precision, 1e-12);
            EXPECT_NEAR(a.recall, b.recall, 1e-12);
        }
    }
}

TEST(select_k, argmax_and_ties)
{
    std::vector<metrics_point> curve{{1, 0, 0, 0.1}, {2, 0, 0, 0.5}, {3, 0, 0, 0.3}};
    EXPECT_EQ(select_k(curve), 2u);
    std::vector<metrics_point> tied{{1, 0, 0, 0.4}, {2, 0, 0, 0.2}, {3, 0, 0, 0.4}};
    EXPECT_EQ(select_k(tied), 1u);
    EXPECT_THROW(select_k(std::vector<metrics_point>{}), config_error);
}

TEST(k_range, values)
{
    auto ks = k_range{}.values();
    EXPECT_EQ(ks.front(), 1u);
    EXPECT_EQ(ks.back(), 20u);
    EXPECT_THROW((k_range{0, 3}.values()), config_error);
    EXPECT_THROW((k_range{5, 3}.values()), config_error);
}

TEST(evaluate_run, selects_on_validation_and_reports_test)
{
    std::map<std::string, std::vector<ranked_list>> by_split{
        {"validation", {ranking("v", {"x", "a", "b", "y"})}},
        {"test", {ranking("t", {"c", "z", "w", "v"})}},
    };
    gold_citations gold{{"v", {"a", "b"}}, {"t", {"c"}}};
    std::vector<std::size_t> ks{1, 2, 3, 4};
    auto report = evaluate_run(by_split, gold, ks);
    EXPECT_EQ(report.selected_k, 3u);
    EXPECT_EQ(report.test_point.k, 3u);
    EXPECT_NEAR(report.test_point.precision, 1.0 / 3.0, 1e-12);
    EXPECT_EQ(report.curves.size(), 2u);

    by_split.erase("test");
    EXPECT_THROW(evaluate_run(by_split, gold, ks), config_error);
}
