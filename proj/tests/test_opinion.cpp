#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "rumorsim/error.hpp"
#include "rumorsim/network.hpp"
#include "rumorsim/opinion.hpp"
#include "rumorsim/rng.hpp"

using namespace rumorsim;

namespace {

std::vector<Message> msgs(std::vector<double> const& scores, AgentId first_sender = 1)
{
    std::vector<Message> out;
    for (double s : scores) {
        out.push_back({first_sender++, s});
    }
    return out;
}

// Straight transcription of the update rule: mean of alpha * (m - o) over accepted m.
double reference_update(double o, std::vector<double> const& inbox, double eps, double alpha)
{
    double sum = 0.0;
    int n = 0;
    for (double m : inbox) {
        if (std::abs(m - o) < eps) {
            sum += alpha * (m - o);
            ++n;
        }
    }
    return n ? std::clamp(o + sum / n, -1.0, 1.0) : o;
}

}  // namespace

TEST_CASE("message is the opinion itself")
{
    CHECK(message_of(0.0) == 0.0);
    CHECK(message_of(0.73) == 0.73);
    CHECK(message_of(-1.0) == -1.0);
}

TEST_CASE("influencer selection")
{
    auto const inbox = msgs({0.4, 0.9});
    auto const kept = select_influencers(0, 0.0, inbox, 0.5);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].score == 0.4);

    CHECK(select_influencers(0, 0.5, msgs({0.5}), 1e-9).size() == 1);
    CHECK(select_influencers(0, -1.0, msgs({-1.0, 0.0, 0.999, -0.3}), 2.0).size() == 4);

    std::vector<Message> with_self{{0, 0.1}, {3, 0.1}};
    auto const others = select_influencers(0, 0.0, with_self, 1.0);
    REQUIRE(others.size() == 1);
    CHECK(others[0].sender == 3);

    // The bound is strict.
    CHECK(select_influencers(0, 0.0, msgs({0.5}), 0.5).empty());
}

TEST_CASE("deffuant update examples")
{
    CHECK(deffuant_update(0.0, msgs({0.4}), 0.5) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(deffuant_update(0.0, msgs({0.4, -0.2}), 0.5) == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(deffuant_update(0.7, {}, 0.5) == 0.7);
}

TEST_CASE("parameter validation")
{
    CHECK_NOTHROW(DeffuantParams{2.0, 1.0}.validate());
    CHECK_THROWS_AS((DeffuantParams{0.0, 0.5}.validate()), ConfigError);
    CHECK_THROWS_AS((DeffuantParams{2.5, 0.5}.validate()), ConfigError);
    CHECK_THROWS_AS((DeffuantParams{1.0, 0.0}.validate()), ConfigError);
    CHECK_THROWS_AS((DeffuantParams{1.0, 1.5}.validate()), ConfigError);
}

TEST_CASE("fused step matches the reference rule and stays bounded")
{
    CounterRng rng(17);
    for (int trial = 0; trial < 5000; ++trial) {
        double const o = rng.uniform(-1.0, 1.0);
        DeffuantParams const p{rng.uniform(1e-3, 2.0), rng.uniform(1e-3, 1.0)};
        std::vector<double> scores(rng.below(12));
        for (double& s : scores) {
            s = rng.uniform(-1.0, 1.0);
        }
        auto const inbox = msgs(scores);
        double const fused = deffuant_step(0, o, inbox, p);
        double const split = deffuant_update(o, select_influencers(0, o, inbox, p.confidence_bound), p.convergence_rate);
        CHECK(fused == doctest::Approx(reference_update(o, scores, p.confidence_bound, p.convergence_rate)).epsilon(1e-12));
        CHECK(split == doctest::Approx(fused).epsilon(1e-12));
        CHECK(fused >= -1.0);
        CHECK(fused <= 1.0);
    }
}

TEST_CASE("update contracts toward the mean of self and accepted messages")
{
    CounterRng rng(23);
    for (int trial = 0; trial < 5000; ++trial) {
        double const o = rng.uniform(-1.0, 1.0);
        double const eps = rng.uniform(0.05, 2.0);
        double const alpha = rng.uniform(1e-3, 1.0);
        std::vector<double> scores;
        std::size_t const n = 1 + rng.below(8);
        while (scores.size() < n) {
            double const m = rng.uniform(-1.0, 1.0);
            if (std::abs(m - o) < eps) {
                scores.push_back(m);
            }
        }
        double const mean = (std::accumulate(scores.begin(), scores.end(), 0.0) + o) / static_cast<double>(n + 1);
        double const next = deffuant_update(o, msgs(scores), alpha);
        CHECK(std::abs(next - mean) <= std::abs(o - mean) + 1e-12);
    }
}

TEST_CASE("step_regular examples")
{
    auto const pair = Graph::from_edges(2, std::vector<Edge>{{0, 1}});
    std::vector<double> const ops{0.2, 0.6};
    auto const next = step_regular(ops, DeffuantParams{2.0, 0.5}, gather_neighbor_messages(pair, ops));
    CHECK(next[0] == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(next[1] == doctest::Approx(0.4).epsilon(1e-15));

    auto const lonely = Graph::from_edges(3, std::vector<Edge>{{0, 1}});
    std::vector<double> const ops3{0.1, -0.1, 0.77};
    CHECK(step_regular(ops3, DeffuantParams{}, gather_neighbor_messages(lonely, ops3))[2] == 0.77);

    std::vector<double> const far{-0.9, 0.9};
    auto const stuck = step_regular(far, DeffuantParams{0.5, 0.5}, gather_neighbor_messages(pair, far));
    CHECK(stuck == far);
}

TEST_CASE("step_regular: masked agents and broadcast messages")
{
    auto const g = Graph::from_edges(3, std::vector<Edge>{{0, 1}, {1, 2}});
    std::vector<double> const ops{0.0, 0.4, 0.8};
    std::vector<DeffuantParams> const params(3, DeffuantParams{2.0, 0.5});
    auto const inboxes = gather_neighbor_messages(g, ops);
    CHECK(inboxes[1].size() == 2);
    CHECK(inboxes[1][0].sender == 0);
    CHECK(inboxes[1][1].sender == 2);

    std::vector<std::uint8_t> const mask{1, 0, 1};
    std::vector<double> out(3);
    step_regular(ops, params, inboxes, mask, out);
    CHECK(out[0] == doctest::Approx(0.2));
    CHECK(out[1] == 0.4);
    CHECK(out[2] == doctest::Approx(0.6));

    std::vector<Message> const broadcast{{kGlobalSender, -1.0}};
    step_regular(ops, params, inboxes, {}, out, broadcast);
    // Agent 0 hears 0.4 and -1.0: 0 + 0.5 * (0.4 - 1.0) / 2.
    CHECK(out[0] == doctest::Approx(-0.15).epsilon(1e-12));
    CHECK(out[1] == doctest::Approx(0.4 + 0.5 * (-0.4 + 0.4 - 1.4) / 3).epsilon(1e-12));
}

TEST_CASE("two mutually connected agents preserve their mean")
{
    auto const pair = Graph::from_edges(2, std::vector<Edge>{{0, 1}});
    CounterRng rng(5);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> const ops{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        auto const next = step_regular(ops, DeffuantParams{2.0, rng.uniform(1e-3, 1.0)}, gather_neighbor_messages(pair, ops));
        CHECK(next[0] + next[1] == doctest::Approx(ops[0] + ops[1]).epsilon(1e-12));
    }
}

TEST_CASE("complete graph reaches consensus")
{
    std::vector<Edge> edges;
    for (AgentId i = 0; i < 100; ++i) {
        for (AgentId j = i + 1; j < 100; ++j) {
            edges.emplace_back(i, j);
        }
    }
    auto const g = Graph::from_edges(100, edges);
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        CounterRng rng(seed);
        std::vector<double> ops(100);
        for (double& o : ops) {
            o = rng.uniform(-1.0, 1.0);
        }
        auto spread = [](std::vector<double> const& v) {
            auto const [lo, hi] = std::minmax_element(v.begin(), v.end());
            return *hi - *lo;
        };
        double prev = spread(ops);
        int steps = 0;
        while (prev >= 1e-3 && steps < 200) {
            ops = step_regular(ops, DeffuantParams{2.0, 0.5}, gather_neighbor_messages(g, ops));
            double const now = spread(ops);
            CHECK(now <= prev + 1e-15);
            prev = now;
            ++steps;
        }
        CHECK(prev < 1e-3);
    }
}

TEST_CASE("processing order does not matter")
{
    auto const g = build_hcn(NetworkConfig{.total_nodes = 300, .rng_seed = 8});
    CounterRng rng(8);
    std::vector<double> ops(300);
    for (double& o : ops) {
        o = rng.uniform(-1.0, 1.0);
    }
    DeffuantParams const p{0.6, 0.4};
    auto const ref = step_regular(ops, p, gather_neighbor_messages(g, ops));

    // Update agents one at a time in a shuffled order, each from the frozen snapshot.
    std::vector<AgentId> order(300);
    std::iota(order.begin(), order.end(), AgentId{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<double> manual(300);
    for (AgentId i : order) {
        std::vector<Message> inbox;
        for (AgentId j : g.neighbors(i)) {
            inbox.push_back({j, ops[j]});
        }
        manual[i] = deffuant_step(i, ops[i], inbox, p);
    }
    CHECK(manual == ref);
}

TEST_CASE("inbox set assembly")
{
    auto const set = InboxSet::from_lists({{{1, 0.5}}, {}, {{0, -0.1}, {4, 0.3}}});
    CHECK(set.size() == 3);
    CHECK(set.total_messages() == 3);
    CHECK(set[1].empty());
    CHECK(set[2][1] == Message{4, 0.3});
}
