#include <algorithm>
#include <map>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "synthetic.hpp"
#include "ucreat/representations.hpp"

using namespace ucreat;
using strings = std::vector<std::string>;

namespace {

normalized_document doc(std::string text)
{
    return {"d", std::move(text), false};
}

bool is_sub_multiset(strings sub, strings full)
{
    std::sort(sub.begin(), sub.end());
    std::sort(full.begin(), full.end());
    return std::includes(full.begin(), full.end(), sub.begin(), sub.end());
}

}  // namespace

TEST(words_stream, rules)
{
    EXPECT_EQ(words_stream(doc("The Court dismissed the appeal.")).tokens,
        (strings{"the", "court", "dismissed", "the", "appeal"}));
    EXPECT_TRUE(words_stream(doc("a I x")).tokens.empty());
    EXPECT_EQ(words_stream(doc("see <CITATION> here")).tokens, (strings{"see", "here"}));
    EXPECT_EQ(words_stream(doc("see <CITATION> here"), true).tokens, (strings{"see", "<CITATION>", "here"}));
    EXPECT_EQ(words_stream(doc("Sec.302 IPC")).tokens, (strings{"sec", "302", "ipc"}));
    EXPECT_EQ(words_stream(doc("x")).kind, variant::words);
}

TEST(atomic_event_stream, keys_in_order_with_duplicates)
{
    EXPECT_TRUE(atomic_event_stream(event_sequence{"d", {}}).tokens.empty());
    event a{"forward", "statement", "", "", "police", 0, 4};
    event b{"dismiss", "court", "appeal", "", "", 1, 2};
    event_sequence seq{"d", {a, b, a}};
    auto s = atomic_event_stream(seq);
    EXPECT_EQ(s.tokens, (strings{"statement|forward|||police", "court|dismiss|appeal||", "statement|forward|||police"}));
    EXPECT_EQ(s.kind, variant::atomic_events);
}

TEST(nonatomic_event_stream, slot_order_flattening)
{
    event forwarded{"forward", "statement", "", "", "police", 0, 4};
    EXPECT_EQ(nonatomic_event_stream(event_sequence{"d", {forwarded}}).tokens, (strings{"statement", "forward", "police"}));
    event multi{"rule", "supreme court", "appeal", "", "", 0, 3};
    EXPECT_EQ(nonatomic_event_stream(event_sequence{"d", {multi}}).tokens,
        (strings{"supreme", "court", "rule", "appeal"}));
    EXPECT_TRUE(nonatomic_event_stream(event_sequence{"d", {}}).tokens.empty());
}

namespace {

struct pair_fixture {
    parsed_document query;
    parsed_document cand;
};

// Query: shared event in sentence 0 only. Candidate: shared event in
// sentences 1 and 3.
pair_fixture traced_pair()
{
    auto q = synth::make_document("q", {synth::event_sentence("bank", "grant", "loan"),
                                           synth::event_sentence("clerk", "stamp", "deed"),
                                           synth::noun_sentence({"land", "tax"})});
    auto c = synth::make_document("c", {synth::event_sentence("thief", "steal", "car"),
                                           synth::event_sentence("bank", "grant", "loan"),
                                           synth::noun_sentence({"revenue", "record"}),
                                           synth::event_sentence("bank", "grant", "loan")});
    return {q, c};
}

}  // namespace

TEST(event_filtered_pair, traced_fixture)
{
    auto [q, c] = traced_pair();
    auto [qs, cs] = event_filtered_pair(q, extract_events(q), c, extract_events(c));
    EXPECT_EQ(qs.tokens, (strings{"bank", "grant", "loan"}));
    EXPECT_EQ(cs.tokens, (strings{"bank", "grant", "loan", "bank", "grant", "loan"}));
    EXPECT_EQ(qs.doc_id, "q");
    EXPECT_EQ(cs.doc_id, "c");
    EXPECT_EQ(qs.kind, variant::event_filtered);
}

TEST(event_filtered_pair, disjoint_and_identical)
{
    auto a = synth::make_document("a", {synth::event_sentence("bank", "grant", "loan")});
    auto b = synth::make_document("b", {synth::event_sentence("court", "hear", "appeal")});
    auto [x, y] = event_filtered_pair(a, extract_events(a), b, extract_events(b));
    EXPECT_TRUE(x.tokens.empty());
    EXPECT_TRUE(y.tokens.empty());

    auto a2 = a;
    a2.doc_id = "a2";
    auto [p, r] = event_filtered_pair(a, extract_events(a), a2, extract_events(a2));
    auto full = words_stream(normalized_document{"a", synth::document_text(a), false}).tokens;
    EXPECT_EQ(p.tokens, full);
    EXPECT_EQ(r.tokens, full);
}

// Symmetry, sub-multiset and provenance properties against random pairs,
// plus equality with the brute-force filter.
TEST(event_filtered_pair, properties)
{
    std::mt19937 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        auto q = synth::random_document(rng, "q");
        auto c = synth::random_document(rng, "c");
        auto qe = extract_events(q);
        auto ce = extract_events(c);
        auto [qs, cs] = event_filtered_pair(q, qe, c, ce);
        auto [cs2, qs2] = event_filtered_pair(c, ce, q, qe);
        EXPECT_EQ(qs.tokens, qs2.tokens);
        EXPECT_EQ(cs.tokens, cs2.tokens);

        auto [oq, oc] = oracle::filtered_pair(q, qe, c, ce);
        EXPECT_EQ(qs.tokens, oq);
        EXPECT_EQ(cs.tokens, oc);

        auto full_q = words_stream(normalized_document{"q", synth::document_text(q), true}).tokens;
        EXPECT_TRUE(is_sub_multiset(qs.tokens, full_q));
    }
}

TEST(label_filtered_stream, keep_sets)
{
    auto d = synth::make_document("d", {synth::noun_sentence({"alpha"}), synth::noun_sentence({"beta"}),
                                           synth::noun_sentence({"gamma"}), synth::noun_sentence({"delta"})});
    sentence_labels labels{"d", {"facts", "ruling", "ratio", "judgment"}};
    EXPECT_EQ(label_filtered_stream(d, labels, {"facts", "ratio"}).tokens, (strings{"alpha", "gamma"}));
    EXPECT_TRUE(label_filtered_stream(d, labels, {}).tokens.empty());
    EXPECT_EQ(label_filtered_stream(d, labels, {"facts", "ruling", "ratio", "judgment"}).tokens,
        (strings{"alpha", "beta", "gamma", "delta"}));
}

TEST(label_filtered_stream, alignment_error_names_document)
{
    auto d = synth::make_document("doc7", {synth::noun_sentence({"alpha"})});
    sentence_labels labels{"doc7", {"facts", "ratio"}};
    try {
        label_filtered_stream(d, labels, {"facts"});
        FAIL();
    } catch (validation_error const& e) {
        EXPECT_NE(std::string(e.what()).find("doc7"), std::string::npos);
    }
}

TEST(read_labels, file_format)
{
    synth::temp_dir dir;
    synth::write_text(dir.path() / "d.json", R"({"labels": ["facts", "ratio"]})");
    auto l = read_labels(dir.path() / "d.json", "d");
    EXPECT_EQ(l.labels, (strings{"facts", "ratio"}));
    synth::write_text(dir.path() / "bad.json", R"(["facts"])");
    EXPECT_THROW(read_labels(dir.path() / "bad.json", "bad"), validation_error);
}

TEST(ngrams, definitions)
{
    strings abc{"a", "b", "c"};
    EXPECT_EQ(ngrams(abc, 2, false), (strings{"a\x1f" "b", "b\x1f" "c"}));
    EXPECT_EQ(ngrams(abc, 2, true), (strings{"a", "b", "c", "a\x1f" "b", "b\x1f" "c"}));
    EXPECT_EQ(ngrams(abc, 1, true), abc);
    EXPECT_EQ(ngrams(abc, 1, false), abc);
    EXPECT_TRUE(ngrams(abc, 4, false).empty());
    EXPECT_THROW(ngrams(abc, 0, true), config_error);
}

TEST(ngrams, length_laws)
{
    std::mt19937 rng(9);
    for (int trial = 0; trial < 200; ++trial) {
        strings toks(std::uniform_int_distribution<std::size_t>(0, 12)(rng));
        for (auto& t : toks) {
            t = std::string(1, static_cast<char>('a' + rng() % 4)) + "x";
        }
        auto n = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
        auto exact = ngrams(toks, n, false);
        EXPECT_EQ(exact.size(), toks.size() >= n ? toks.size() - n + 1 : 0);
        std::size_t expected = 0;
        for (std::size_t k = 1; k <= n; ++k) {
            expected += toks.size() >= k ? toks.size() - k + 1 : 0;
        }
        EXPECT_EQ(ngrams(toks, n, true).size(), expected);
        EXPECT_EQ(ngrams(toks, n, true), oracle::ngrams(toks, n, true));
    }
}
