#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <string>

#include "rumorsim/config.hpp"
#include "rumorsim/error.hpp"

using namespace rumorsim;
using nlohmann::json;

namespace {

std::string const kFull = R"({
  "network": {"kind": "random", "nodes": 300, "m": 3, "p": 0.6, "edges": 900, "seed": 5},
  "steps": 12,
  "seed": 9,
  "deffuant": {"epsilon": 0.8, "alpha": 0.4, "epsilon_range": [0.5, 1.0]},
  "grouping": {"strategy": "adaptive", "beta": 0.7, "threshold": 0.4, "min_neighbors": 3, "max_core": 20},
  "persona": {"age_mean": 40, "age_stddev": 8},
  "driver": {"kind": "scripted", "parallelism": 2, "scripted": {"base_window": 0.9, "base_rate": 0.25}},
  "memory": {"retrieval_k": 6, "decay": 0.8, "reflection_recent": 7},
  "reflection_period": 3,
  "event_importance": 7,
  "topic": "Is it true?",
  "initial_opinions": {"kind": "two_point", "values": [-0.5, 0.5], "weight": 0.3, "jitter": 0.1,
                       "seed_group": {"fraction": 0.1, "selector": "top_degree", "alpha": 0.05}},
  "events": [{"step": 0, "text": "this story might be true", "score": 0.2},
             {"from": 2, "until": 5, "text": "experts doubt it", "score": -0.5, "audience": "core"}],
  "interventions": [{"kind": "leader_continuous", "start_step": 4, "leader": 7},
                    {"kind": "single", "start_step": 2, "message": "false!", "message_score": -0.9}],
  "checkpoint_every": 4
})";

}  // namespace

TEST_CASE("defaults from an empty document")
{
    auto const c = parse_config("{}");
    CHECK(c.steps == 20);
    CHECK(c.seed == 42);
    CHECK(c.network.kind == NetworkKind::hcn);
    CHECK(c.deffuant.base.confidence_bound == 1.0);
    CHECK(c.deffuant.base.convergence_rate == 0.5);
    CHECK(c.grouping.beta == 0.5);
    CHECK(c.grouping.threshold == 0.5);
    CHECK(c.grouping.min_neighbors == 5);
    CHECK(c.grouping.max_core == 100);
    CHECK(c.memory.retrieval_k == 10);
    CHECK(c.memory.decay == 0.9);
    CHECK(c.reflection_period == 5);
    CHECK(c.initial.kind == InitialOpinionSpec::Kind::uniform);
    CHECK(c.events.empty());
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("full document parses every field")
{
    auto const c = parse_config(kFull);
    CHECK(c.network.kind == NetworkKind::random);
    CHECK(c.network.edges == 900);
    CHECK(c.network.seed == 5u);
    CHECK(c.deffuant.epsilon_range == std::array<double, 2>{0.5, 1.0});
    CHECK_FALSE(c.deffuant.alpha_range);
    CHECK(c.grouping.max_core == 20);
    CHECK(c.persona.age_mean == 40.0);
    CHECK_FALSE(c.persona.names.empty());
    CHECK(c.driver.parallelism == 2);
    CHECK(c.driver.scripted.base_rate == 0.25);
    CHECK(c.initial.kind == InitialOpinionSpec::Kind::two_point);
    REQUIRE(c.initial.seed_group);
    CHECK(c.initial.seed_group->selector == SeedGroupSpec::Selector::top_degree);
    CHECK(c.initial.seed_group->alpha == 0.05);
    REQUIRE(c.events.size() == 2);
    CHECK(c.events[0].from == 0);
    CHECK(c.events[0].until == 1);
    CHECK(c.events[1].audience == Audience::core);
    CHECK(c.events[1].active_at(4));
    CHECK_FALSE(c.events[1].active_at(5));
    REQUIRE(c.interventions.size() == 2);
    CHECK(c.interventions[0].kind == InterventionKind::leader_continuous);
    CHECK(c.interventions[0].leader_id == 7u);
    CHECK(c.interventions[1].message == "false!");
    CHECK(c.checkpoint_every == 4);
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("round trip through json")
{
    auto const c = parse_config(kFull);
    auto const j = config_to_json(c);
    auto const back = config_from_json(json::parse(j.dump()));
    CHECK(config_to_json(back) == j);
    CHECK(config_hash(back) == config_hash(c));

    auto const d = parse_config("{}");
    CHECK(config_to_json(config_from_json(json::parse(config_to_json(d).dump()))) == config_to_json(d));
}

TEST_CASE("unknown keys and bad values are rejected")
{
    CHECK_THROWS_WITH_AS(parse_config(R"({"stepz": 3})"), doctest::Contains("stepz"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config(R"({"network": {"nodez": 3}})"), doctest::Contains("network.nodez"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"steps": "ten"})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"steps": -1})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"network": {"kind": "torus"}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"events": [{"step": 1, "from": 0, "text": "x"}]})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"interventions": [{"kind": "loud", "start_step": 1}]})"), ConfigError);
    CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("validation")
{
    auto bad = [](std::string const& text) { return parse_config(text).validate(); };
    CHECK_THROWS_AS(bad(R"({"deffuant": {"epsilon": 3}})"), ConfigError);
    CHECK_THROWS_AS(bad(R"({"deffuant": {"alpha": 0}})"), ConfigError);
    CHECK_THROWS_AS(bad(R"({"steps": 5, "interventions": [{"kind": "single", "start_step": 5}]})"), ConfigError);
    CHECK_THROWS_AS(bad(R"({"network": {"kind": "file", "path": "/nonexistent.graph"}})"), ConfigError);
    CHECK_THROWS_AS(bad(R"({"initial_opinions": {"low": 0.5, "high": 0.1}})"), ConfigError);
    CHECK_THROWS_AS(bad(R"({"grouping": {"beta": -1}})"), ConfigError);
}

TEST_CASE("relative paths resolve against the config directory")
{
    auto const dir = std::filesystem::temp_directory_path() / "rumorsim_config_test";
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "ops.txt") << "0.1\n";
    std::ofstream(dir / "c.json") << R"({"initial_opinions": {"kind": "file", "path": "ops.txt"}})";
    auto const c = load_config(dir / "c.json");
    CHECK(std::filesystem::path(c.initial.path) == dir / "ops.txt");
    std::filesystem::remove_all(dir);
}

TEST_CASE("config hash ignores schedule-only fields")
{
    auto const base = parse_config(kFull);
    auto c = base;
    c.steps = 40;
    c.interventions.clear();
    c.checkpoint_every = 0;
    c.driver.parallelism = 7;
    CHECK(config_hash(c) == config_hash(base));
    c.seed += 1;
    CHECK(config_hash(c) != config_hash(base));
    c = base;
    c.deffuant.base.convergence_rate = 0.41;
    CHECK(config_hash(c) != config_hash(base));
    c = base;
    c.events.pop_back();
    CHECK(config_hash(c) != config_hash(base));
}

TEST_CASE("intervention spec strings")
{
    auto const s = parse_intervention_spec("single@3");
    CHECK(s.kind == InterventionKind::single);
    CHECK(s.start_step == 3);
    CHECK(s.message_score == -0.8);

    auto const c = parse_intervention_spec("continuous@5:score=-0.6,message=stop sharing");
    CHECK(c.kind == InterventionKind::continuous);
    CHECK(c.message_score == -0.6);
    CHECK(c.message == "stop sharing");

    auto const l = parse_intervention_spec("leader_continuous@2:leader=11");
    CHECK(l.leader_id == 11u);
    CHECK_FALSE(parse_intervention_spec("leader_continuous@2:leader=top_degree").leader_id);
    CHECK(parse_intervention_spec("leader@1").kind == InterventionKind::leader_continuous);

    CHECK_THROWS_AS(parse_intervention_spec("single"), ConfigError);
    CHECK_THROWS_AS(parse_intervention_spec("shout@1"), ConfigError);
    CHECK_THROWS_AS(parse_intervention_spec("single@x"), ConfigError);
    CHECK_THROWS_AS(parse_intervention_spec("single@1:volume=3"), ConfigError);
    CHECK_THROWS_AS(parse_intervention_spec("single@1:score=abc"), ConfigError);
}

TEST_CASE("intervention schedules")
{
    auto const single = parse_intervention_spec("single@3");
    CHECK(single.broadcasts_at(3));
    CHECK_FALSE(single.broadcasts_at(4));
    CHECK_FALSE(single.pins_leader_at(3));

    auto const cont = parse_intervention_spec("continuous@3");
    std::vector<Step> at;
    for (Step t = 0; t < 10; ++t) {
        if (cont.broadcasts_at(t)) {
            at.push_back(t);
        }
    }
    CHECK(at == std::vector<Step>{3, 4, 5, 6, 7, 8, 9});

    auto const leader = parse_intervention_spec("leader_continuous@3");
    CHECK(leader.pins_leader_at(3));
    CHECK(leader.pins_leader_at(9));
    CHECK_FALSE(leader.pins_leader_at(2));
}
