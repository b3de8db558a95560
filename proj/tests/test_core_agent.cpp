#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "rumorsim/core_agent.hpp"
#include "rumorsim/driver.hpp"
#include "rumorsim/error.hpp"
#include "rumorsim/memory.hpp"
#include "rumorsim/persona.hpp"
#include "rumorsim/rng.hpp"

using namespace rumorsim;

namespace {

HashingEmbedder const embedder;

Persona neutral_persona()
{
    Persona p;
    p.name = "Test";
    p.interests = {"a", "b", "c"};
    return p;
}

MemoryRecord record(std::string text, double importance, Step t, MemoryKind kind = MemoryKind::personal,
                    TweetId tweet = kNoTweet)
{
    MemoryRecord r;
    r.content = make_content(std::move(text), embedder);
    r.importance = importance;
    r.timestamp = t;
    r.kind = kind;
    r.tweet = tweet;
    return r;
}

// Driver that returns a canned action or throws on demand.
class StubDriver final : public Driver {
  public:
    Action next;
    bool fail_action = false;
    bool unavailable = false;
    bool fail_questions = false;
    int action_calls = 0;

    Action generate_action(ActionRequest const&) override
    {
        ++action_calls;
        if (unavailable) {
            throw DriverUnavailable("down");
        }
        if (fail_action) {
            throw DriverError("garbled");
        }
        return next;
    }
    double score_opinion(std::string_view text) override { return ScriptedDriver::lexicon_score(text); }
    double score_importance(std::string_view) override { return 4.0; }
    std::vector<std::string> generate_questions(std::span<MemoryRecord const>) override
    {
        if (fail_questions) {
            throw DriverError("no questions");
        }
        return {"q"};
    }
    std::vector<std::string> reflect(std::span<std::string const>, std::span<MemoryRecord const>) override
    {
        return {"insight"};
    }
    std::vector<std::string> infer_interests(Persona const&, std::uint64_t) override { return {"x"}; }
};

// Mean of the standard normal truncated to [a, b], from the closed form.
double truncated_normal_mean(double mu, double sigma, double lo, double hi)
{
    auto const pdf = [](double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); };
    auto const cdf = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
    double const a = (lo - mu) / sigma;
    double const b = (hi - mu) / sigma;
    return mu + sigma * (pdf(a) - pdf(b)) / (cdf(b) - cdf(a));
}

}  // namespace

TEST_CASE("hashing embedder")
{
    auto const e = embedder.embed("the story is true");
    CHECK(e.size() == 64);
    double norm = 0.0;
    for (float x : e) {
        CHECK(x >= 0.0f);
        norm += static_cast<double>(x) * x;
    }
    CHECK(std::sqrt(norm) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(embedder.embed("the story is true") == e);
    auto const empty = embedder.embed("");
    CHECK(empty[0] == 1.0f);
    CHECK(cosine(embedder.embed("the story is true"), embedder.embed("the story is true!")) >
          cosine(embedder.embed("the story is true"), embedder.embed("weather forecast for monday")));
    CHECK_THROWS_AS(HashingEmbedder(0), ConfigError);
    CHECK_THROWS_AS(cosine(std::vector<float>{1.0f}, std::vector<float>{1.0f, 0.0f}), InterfaceError);
}

TEST_CASE("retrieval score examples")
{
    auto const r = record("something happened", 10.0, 3);
    CHECK(retrieval_score(r, r.embedding(), 3, 0.9) == doctest::Approx(10.0).epsilon(1e-6));

    MemoryRecord orth = r;
    Embedding basis(64, 0.0f);
    basis[0] = 1.0f;
    Embedding other(64, 0.0f);
    other[1] = 1.0f;
    orth.content = std::make_shared<MemoryContent>(MemoryContent{"x", basis});
    CHECK(retrieval_score(orth, other, 3, 0.9) == 0.0);

    auto r5 = record("something happened", 5.0, 1);
    CHECK(retrieval_score(r5, r5.embedding(), 3, 0.9) == doctest::Approx(4.05).epsilon(1e-6));

    // Negative cosine is floored.
    Embedding neg(64, 0.0f);
    neg[0] = -1.0f;
    CHECK(retrieval_score(orth, neg, 3, 0.9) == 0.0);
    CHECK_THROWS_AS(retrieval_score(r, std::vector<float>{1.0f}, 3, 0.9), InterfaceError);
    CHECK_THROWS_AS(retrieval_score(r, r.embedding(), 2, 0.9), DomainError);
}

TEST_CASE("retrieval score decays with age")
{
    CounterRng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        auto const r = record("post " + std::to_string(rng.below(50)), rng.uniform(1.0, 10.0), 0);
        auto const q = embedder.embed("post " + std::to_string(rng.below(50)));
        double const decay = rng.uniform(0.01, 1.0);
        double prev = retrieval_score(r, q, 0, decay);
        for (Step now = 1; now < 30; ++now) {
            double const s = retrieval_score(r, q, now, decay);
            CHECK(s <= prev);
            prev = s;
        }
    }
}

TEST_CASE("top-k retrieval")
{
    MemoryStore store;
    CHECK(retrieve_top_k(store, "anything", 3, 0, embedder, 0.9).empty());

    store.add(record("apples are red", 2.0, 0));
    store.add(record("apples are red", 9.0, 0));
    auto const top = retrieve_top_k(store, "apples are red", 1, 0, embedder, 0.9);
    REQUIRE(top.size() == 1);
    CHECK(top[0].importance == 9.0);
    CHECK(retrieve_top_k(store, "apples are red", 5, 0, embedder, 0.9).size() == 2);

    // Equal scores: the newer record wins, then the earlier insertion.
    MemoryStore ties;
    ties.add(record("same", 5.0, 1));
    ties.add(record("same", 5.0, 1));
    auto const tied = retrieve_top_k(ties, "same", 2, 1, embedder, 1.0);
    CHECK(tied[0].sequence == 0);
    CHECK(tied[1].sequence == 1);
}

TEST_CASE("top-k retrieval agrees with a full sort")
{
    std::vector<std::string> const words{"story", "true", "false", "leak", "report", "expert", "rumor", "news"};
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        CounterRng rng(seed);
        MemoryStore store;
        std::size_t const n = 1 + rng.below(seed <= 3 ? 1000 : 60);
        for (std::size_t i = 0; i < n; ++i) {
            std::string text = words[rng.below(words.size())] + " " + words[rng.below(words.size())];
            auto const kind = rng.bernoulli(0.5) ? MemoryKind::personal : MemoryKind::environmental;
            store.add(record(text, 1.0 + rng.below(10), static_cast<Step>(rng.below(20)), kind));
        }
        auto const q = embedder.embed(words[rng.below(words.size())]);
        std::size_t const k = 1 + rng.below(12);

        std::vector<MemoryRecord> all(store.personal().begin(), store.personal().end());
        all.insert(all.end(), store.environmental().begin(), store.environmental().end());
        std::sort(all.begin(), all.end(), [&](MemoryRecord const& a, MemoryRecord const& b) {
            double const sa = retrieval_score(a, q, 20, 0.9);
            double const sb = retrieval_score(b, q, 20, 0.9);
            if (sa != sb) {
                return sa > sb;
            }
            if (a.timestamp != b.timestamp) {
                return a.timestamp > b.timestamp;
            }
            return a.sequence < b.sequence;
        });
        all.resize(std::min(k, all.size()));
        auto const got = retrieve_top_k(store, q, k, 20, 0.9);
        REQUIRE(got.size() == all.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].sequence == all[i].sequence);
        }
    }
}

TEST_CASE("memory store invariants")
{
    MemoryStore store;
    CHECK_THROWS_AS(store.add(MemoryRecord{}), InterfaceError);
    CHECK_THROWS_AS(store.add(record("x", 0.5, 0)), InterfaceError);
    CHECK_THROWS_AS(store.add(record("x", 10.5, 0)), InterfaceError);
    auto bad = record("x", 1.0, 0);
    bad.content = std::make_shared<MemoryContent>(MemoryContent{"x", Embedding(64, 1.0f)});
    CHECK_THROWS_AS(store.add(bad), InterfaceError);
    store.add(record("x", 1.0, 0));
    auto shorter = record("y", 1.0, 0);
    shorter.content = std::make_shared<MemoryContent>(MemoryContent{"y", Embedding{1.0f}});
    CHECK_THROWS_AS(store.add(shorter), InterfaceError);

    ScriptedDriver driver;
    CounterRng rng(9);
    MemoryStore random;
    for (int i = 0; i < 300; ++i) {
        std::string text(rng.below(40), 'a');
        for (char& c : text) {
            c = static_cast<char>('a' + rng.below(26));
        }
        auto const& r = write_memory(random, text, MemoryKind::environmental, i, embedder, driver);
        CHECK(r.importance >= 1.0);
        CHECK(r.importance <= 10.0);
        CHECK(r.embedding().size() == embedder.dimension());
        double norm = 0.0;
        for (float x : r.embedding()) {
            norm += static_cast<double>(x) * x;
        }
        CHECK(std::abs(std::sqrt(norm) - 1.0) < 1e-6);
    }
    CHECK(random.environmental().size() == 300);
    CHECK(random.recent(3)[0].timestamp == 299);
}

TEST_CASE("write_memory examples")
{
    ScriptedDriver driver;
    MemoryStore store;
    write_memory(store, "the weather is mild today", MemoryKind::environmental, 0, embedder, driver);
    auto const& target = write_memory(store, "the mayor announced a new bridge", MemoryKind::environmental, 0, embedder, driver);
    auto const seq = target.sequence;
    write_memory(store, "cats sleep most of the day", MemoryKind::personal, 0, embedder, driver);
    auto const top = retrieve_top_k(store, "the mayor announced a new bridge", 1, 0, embedder, 0.9);
    REQUIRE(top.size() == 1);
    CHECK(top[0].sequence == seq);

    MemoryStore twice;
    write_memory(twice, "this story is probably true", MemoryKind::personal, 1, embedder, driver);
    write_memory(twice, "this story is probably true", MemoryKind::personal, 4, embedder, driver);
    auto const newer = retrieve_top_k(twice, "this story is probably true", 1, 6, embedder, 0.9);
    CHECK(newer[0].timestamp == 4);

    MemoryStore blank;
    CHECK(write_memory(blank, "", MemoryKind::personal, 0, embedder, driver).importance == 1.0);
}

TEST_CASE("personas")
{
    ScriptedDriver driver;
    auto const config = PersonaConfig::defaults();
    CHECK(make_persona(77, config, driver) == make_persona(77, config, driver));
    CHECK_FALSE(make_persona(77, config, driver) == make_persona(78, config, driver));

    double sum = 0.0;
    constexpr int n = 10'000;
    for (int i = 0; i < n; ++i) {
        auto const p = make_persona(static_cast<std::uint64_t>(i), config, driver);
        REQUIRE(p.age >= 18);
        REQUIRE(p.age <= 80);
        REQUIRE(p.interests.size() >= 3);
        REQUIRE(p.interests.size() <= 5);
        std::set<std::string> const unique(p.interests.begin(), p.interests.end());
        REQUIRE(unique.size() == p.interests.size());
        for (double t : p.traits.as_array()) {
            REQUIRE(t >= 0.0);
            REQUIRE(t <= 1.0);
        }
        sum += p.age;
    }
    double const oracle = truncated_normal_mean(35.0, 12.0, 18.0, 80.0);
    CHECK(oracle == doctest::Approx(36.9).epsilon(0.01));
    CHECK(std::abs(sum / n - oracle) < 1.0);

    double raw = 0.0;
    for (int i = 0; i < n; ++i) {
        double const a = sample_truncated_normal(static_cast<std::uint64_t>(i) + 1, 0.0, 1.0, -0.5, 2.0);
        REQUIRE(a >= -0.5);
        REQUIRE(a <= 2.0);
        raw += a;
    }
    CHECK(std::abs(raw / n - truncated_normal_mean(0.0, 1.0, -0.5, 2.0)) < 0.03);

    PersonaConfig empty = config;
    empty.names.clear();
    CHECK_THROWS_AS(make_persona(1, empty, driver), ConfigError);
    empty = config;
    empty.occupations.clear();
    CHECK_THROWS_AS(make_persona(1, empty, driver), ConfigError);

    StubDriver stub;
    CHECK_THROWS_AS(make_persona(1, config, stub), DriverError);
    CHECK(describe(make_persona(5, config, driver)).find("year-old") != std::string::npos);
}

TEST_CASE("scripted lexicon and templates")
{
    CHECK(ScriptedDriver::lexicon_score("It is DEFINITELY TRUE") == doctest::Approx(5.0 / 6.0));
    CHECK(ScriptedDriver::lexicon_score("probably true, probably false") == 0.0);
    CHECK(ScriptedDriver::lexicon_score("nothing to see") == 0.0);
    for (int k = -10; k <= 10; ++k) {
        double const o = k / 10.0;
        double const s = ScriptedDriver::lexicon_score(ScriptedDriver::render(o, static_cast<std::uint64_t>(k + 10)));
        CHECK((s > 0) == (o >= 0));
        double const mag = std::abs(o);
        double const mid = mag < 1.0 / 3 ? 1.0 / 6 : mag < 2.0 / 3 ? 0.5 : 5.0 / 6;
        CHECK(std::abs(s) == doctest::Approx(mid));
    }
    ScriptedDriver d;
    CHECK(d.score_importance("") == 1.0);
    CHECK(d.score_importance("definitely false") == doctest::Approx(1.0 + 8.0 * 5.0 / 6.0));
}

TEST_CASE("act: scripted examples")
{
    ScriptedDriver driver;
    ContentCache cache(embedder, driver);
    MemoryParams const params;
    auto persona = neutral_persona();
    persona.traits.agreeableness = 0.9;

    SUBCASE("empty environment and memory do nothing")
    {
        MemoryStore store;
        auto const r = act({persona, 0.3, store}, "", NeighborDigest{}, cache, 0, params, 1);
        CHECK(r.action.kind == ActionKind::do_nothing);
        CHECK(r.opinion == 0.3);
        CHECK(r.driver_calls == 1);
        CHECK(store.empty());
    }

    SUBCASE("pro-rumor memories produce a positive post")
    {
        MemoryStore store;
        for (int i = 0; i < 4; ++i) {
            write_memory(store, "A leaked report says this story is definitely true.", MemoryKind::environmental, 0, cache);
            write_memory(store, "Friends say this story is probably true.", MemoryKind::environmental, 0, cache);
        }
        auto const r = act({persona, 0.0, store}, "Is the story true?", NeighborDigest{}, cache, 1, params, 7);
        CHECK(r.action.kind == ActionKind::post);
        CHECK(ScriptedDriver::lexicon_score(r.action.content) > 0.0);
        CHECK(r.opinion > 0.0);
        CHECK(store.personal().size() == 1);
        CHECK(store.personal()[0].text() == r.action.content);

        // Same inputs, same action.
        MemoryStore copy = store;
        auto const again = act({persona, 0.0, copy}, "Is the story true?", NeighborDigest{}, cache, 1, params, 7);
        CHECK(again.action.content == r.action.content);
    }

    SUBCASE("digest alone can move the agent")
    {
        MemoryStore store;
        NeighborDigest digest;
        digest.count = 3;
        digest.negative = 3;
        digest.mean_score = -0.8;
        auto const r = act({persona, 0.0, store}, "", digest, cache, 0, params, 3);
        CHECK(r.action.kind == ActionKind::post);
        CHECK(r.opinion < 0.0);
    }
}

TEST_CASE("act: every produced action is valid")
{
    ScriptedDriver driver;
    ContentCache cache(embedder, driver);
    MemoryParams const params;
    std::vector<std::string> const texts{
        "this story is definitely true", "this story might be false", "people say it is probably false",
        "undecided", "I think this story might be true.", "lunch was good",
    };
    CounterRng rng(101);
    for (int trial = 0; trial < 300; ++trial) {
        auto persona = neutral_persona();
        persona.traits = {rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform()};
        MemoryStore store;
        std::size_t const n = rng.below(8);
        for (std::size_t i = 0; i < n; ++i) {
            write_memory(store, texts[rng.below(texts.size())], MemoryKind::environmental, 0, cache, 1 + rng.below(5));
        }
        NeighborDigest digest;
        if (rng.bernoulli(0.5)) {
            digest.count = 1;
            digest.mean_score = rng.uniform(-1.0, 1.0);
        }
        auto const r = act({persona, rng.uniform(-1.0, 1.0), store}, texts[rng.below(texts.size())], digest, cache, 1,
                           params, rng());
        CHECK(is_valid(r.action));
        CHECK(r.opinion >= -1.0);
        CHECK(r.opinion <= 1.0);
        CHECK_FALSE(r.coerced);
    }
}

TEST_CASE("act: malformed and failing drivers")
{
    StubDriver stub;
    ContentCache cache(embedder, stub);
    MemoryParams const params;
    auto const persona = neutral_persona();
    MemoryStore store;

    stub.next.kind = ActionKind::like;  // no target
    auto r = act({persona, 0.2, store}, "env", NeighborDigest{}, cache, 0, params, 1);
    CHECK(r.action.kind == ActionKind::do_nothing);
    CHECK(r.coerced);
    CHECK(r.opinion == 0.2);

    stub.next = Action{ActionKind::post, "", {}, {}};
    r = act({persona, 0.2, store}, "env", NeighborDigest{}, cache, 0, params, 1);
    CHECK(r.coerced);

    stub.next = Action{ActionKind::post, "this is definitely false", {}, {}};
    r = act({persona, 0.2, store}, "env", NeighborDigest{}, cache, 0, params, 1);
    CHECK_FALSE(r.coerced);
    CHECK(r.opinion == doctest::Approx(-5.0 / 6.0));

    stub.next = Action{ActionKind::reply, "whatever", TweetId{3}, 4.0};
    r = act({persona, 0.2, store}, "env", NeighborDigest{}, cache, 0, params, 1);
    CHECK(r.opinion == 1.0);

    stub.fail_action = true;
    r = act({persona, 0.2, store}, "env", NeighborDigest{}, cache, 0, params, 1);
    CHECK(r.coerced);
    CHECK(r.action.kind == ActionKind::do_nothing);

    stub.unavailable = true;
    CHECK_THROWS_AS(act({persona, 0.2, store}, "env", NeighborDigest{}, cache, 0, params, 1), DriverUnavailable);
}

TEST_CASE("action validity")
{
    CHECK(is_valid(Action::nothing()));
    CHECK(is_valid(Action{ActionKind::post, "x", {}, {}}));
    CHECK_FALSE(is_valid(Action{ActionKind::post, "", {}, {}}));
    CHECK_FALSE(is_valid(Action{ActionKind::retweet, "x", {}, {}}));
    CHECK(is_valid(Action{ActionKind::like, "", TweetId{1}, {}}));
    CHECK_FALSE(is_valid(Action{ActionKind::reply, "", TweetId{1}, {}}));
    CHECK(parse_action_kind("do_nothing") == ActionKind::do_nothing);
    CHECK_FALSE(parse_action_kind("shout"));
}

TEST_CASE("reflection")
{
    ScriptedDriver driver;
    ContentCache cache(embedder, driver);
    MemoryParams const params;

    MemoryStore empty;
    auto const none = reflect(empty, cache, 0, params);
    CHECK(none.insights == 0);
    CHECK(empty.empty());

    MemoryStore store;
    for (auto const* text : {"this story is probably true", "this story is definitely true", "this story is probably false",
                             "it might be true", "lunch was great"}) {
        write_memory(store, text, MemoryKind::environmental, 1, cache);
    }
    auto const r = reflect(store, cache, 2, params);
    CHECK(r.insights == 1);
    CHECK(r.driver_calls == 2);
    REQUIRE(store.personal().size() == 1);
    CHECK(store.personal()[0].text() == "Looking back, most of what I saw says this story is probably true.");
    CHECK(store.personal()[0].timestamp == 2);

    MemoryStore negative;
    for (auto const* text : {"probably false", "definitely false", "might be true"}) {
        write_memory(negative, text, MemoryKind::environmental, 0, cache);
    }
    reflect(negative, cache, 0, params);
    CHECK(negative.personal()[0].text().find("probably false") != std::string::npos);

    StubDriver stub;
    stub.fail_questions = true;
    ContentCache stub_cache(embedder, stub);
    MemoryStore skipped;
    write_memory(skipped, "x", MemoryKind::environmental, 0, stub_cache);
    CHECK(reflect(skipped, stub_cache, 0, params).insights == 0);
    CHECK(skipped.size() == 1);
}
