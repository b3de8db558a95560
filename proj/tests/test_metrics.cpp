#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include "rumorsim/error.hpp"
#include "rumorsim/metrics.hpp"
#include "rumorsim/network.hpp"
#include "rumorsim/rng.hpp"

using namespace rumorsim;

namespace {

OpinionSeries series(std::vector<double> v) { return OpinionSeries::from_values(std::move(v)); }

// Minimum over every monotone alignment path from (0,0) to (n-1,m-1).
double dtw_paths(std::vector<double> const& a, std::vector<double> const& b, std::size_t i = 0, std::size_t j = 0)
{
    double const here = std::abs(a[i] - b[j]);
    if (i + 1 == a.size() && j + 1 == b.size()) {
        return here;
    }
    double best = std::numeric_limits<double>::infinity();
    if (i + 1 < a.size()) {
        best = std::min(best, dtw_paths(a, b, i + 1, j));
    }
    if (j + 1 < b.size()) {
        best = std::min(best, dtw_paths(a, b, i, j + 1));
    }
    if (i + 1 < a.size() && j + 1 < b.size()) {
        best = std::min(best, dtw_paths(a, b, i + 1, j + 1));
    }
    return here + best;
}

std::vector<double> random_values(CounterRng& rng, std::size_t n)
{
    std::vector<double> v(n);
    for (double& x : v) {
        x = rng.uniform(-1.0, 1.0);
    }
    return v;
}

Graph relabel(Graph const& g, std::vector<AgentId> const& perm)
{
    std::vector<Edge> edges;
    for (auto [i, j] : g.edges()) {
        edges.emplace_back(perm[i], perm[j]);
    }
    return Graph::from_edges(g.node_count(), edges);
}

}  // namespace

TEST_CASE("bias and divergence")
{
    auto const a = series({0.1, -0.3, 0.7});
    CHECK(delta_bias(a, a) == 0.0);
    CHECK(delta_div(a, a) == 0.0);
    CHECK(delta_bias(series({0.5, 0.5, 0.5, 0.5}), series({0.3, 0.3, 0.3, 0.3})) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(delta_bias(series({0.0, 1.0}), series({1.0, 0.0})) == 1.0);
    CHECK(delta_div(series({0.4, 0.1, -0.2}), series({0.2, -0.1, -0.4})) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(delta_div(series({0.0, 0.2}), series({0.0, 0.0})) == doctest::Approx(0.01).epsilon(1e-12));

    CHECK_THROWS_AS(delta_bias(series({0.0, 1.0}), series({0.0})), AlignmentError);
    CHECK_THROWS_AS(delta_div(series({0.0}), series({})), AlignmentError);
    auto shifted = series({0.0, 1.0});
    shifted.steps = {1, 2};
    CHECK_THROWS_AS(delta_bias(series({0.0, 1.0}), shifted), AlignmentError);
}

TEST_CASE("dtw examples")
{
    std::vector<double> const a{0.3, -0.2, 0.9};
    CHECK(dtw(a, a) == 0.0);
    CHECK(dtw(std::vector<double>{0.0, 0.0}, std::vector<double>{1.0, 1.0}) == 2.0);
    CHECK(dtw(std::vector<double>{0.0}, std::vector<double>{1.0, 2.0, 3.0}) == 6.0);
    CHECK_THROWS_AS(dtw(std::vector<double>{}, a), DomainError);
    CHECK(dtw(series({0.0, 0.0}), series({1.0, 1.0})) == 2.0);
}

TEST_CASE("dtw matches exhaustive path enumeration")
{
    CounterRng rng(31);
    for (int trial = 0; trial < 500; ++trial) {
        auto const a = random_values(rng, 1 + rng.below(6));
        auto const b = random_values(rng, 1 + rng.below(6));
        double const d = dtw(a, b);
        CHECK(d == doctest::Approx(dtw_paths(a, b)).epsilon(1e-12));
        CHECK(d == doctest::Approx(dtw(b, a)).epsilon(1e-12));
        CHECK(dtw(a, a) == 0.0);
    }
}

TEST_CASE("pearson examples")
{
    std::vector<double> const a{0.1, 0.5, -0.3, 0.8};
    std::vector<double> b(a.size());
    std::transform(a.begin(), a.end(), b.begin(), [](double x) { return 2 * x + 1; });
    CHECK(pearson(a, b) == doctest::Approx(1.0).epsilon(1e-12));
    std::transform(a.begin(), a.end(), b.begin(), [](double x) { return -x; });
    CHECK(pearson(a, b) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{1, 3, 2}) == doctest::Approx(0.5).epsilon(1e-12));

    CHECK_THROWS_AS(pearson(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}), DomainError);
    CHECK_THROWS_AS(pearson(std::vector<double>{1}, std::vector<double>{2}), DomainError);
    CHECK_THROWS_AS(pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}), AlignmentError);
}

TEST_CASE("pearson is invariant under positive affine maps")
{
    CounterRng rng(37);
    for (int trial = 0; trial < 300; ++trial) {
        std::size_t const n = 2 + rng.below(20);
        auto const a = random_values(rng, n);
        auto const b = random_values(rng, n);
        double const r = pearson(a, b);
        CHECK(r >= -1.0);
        CHECK(r <= 1.0);
        double const scale = rng.uniform(0.1, 10.0);
        double const shift = rng.uniform(-5.0, 5.0);
        auto c = a;
        for (double& x : c) {
            x = scale * x + shift;
        }
        CHECK(pearson(c, b) == doctest::Approx(r).epsilon(1e-9));
        CHECK(pearson(b, c) == doctest::Approx(r).epsilon(1e-9));
    }
}

TEST_CASE("population-level indices")
{
    CHECK(polarization(std::vector<double>{0.4, 0.4, 0.4}) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(polarization(std::vector<double>{-1.0, 1.0}) == 1.0);
    CHECK(polarization(std::vector<double>{0.0, 0.0, 1.0}) == doctest::Approx(2.0 / 9.0).epsilon(1e-12));

    auto const tri = Graph::from_edges(3, std::vector<Edge>{{0, 1}, {1, 2}, {0, 2}});
    CHECK(global_disagreement(std::vector<double>{0.2, 0.2, 0.2}, tri) == 0.0);
    auto const pair = Graph::from_edges(2, std::vector<Edge>{{0, 1}});
    CHECK(global_disagreement(std::vector<double>{-1.0, 1.0}, pair) == 1.0);
    CHECK(global_disagreement(std::vector<double>{0.0, 0.5, 1.0}, tri) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK_THROWS_AS(global_disagreement(std::vector<double>{0.0, 0.0}, Graph::from_edges(2, std::vector<Edge>{})),
                    DomainError);

    CHECK(nci(std::vector<double>{0.3, 0.3, 0.3}, tri) == 1.0);
    std::vector<Edge> star;
    for (AgentId i = 1; i <= 5; ++i) {
        star.emplace_back(0, i);
    }
    auto const s = Graph::from_edges(6, star);
    CHECK(nci(std::vector<double>{1.0, -1.0, -1.0, -1.0, -1.0, -1.0}, s, 0.2) == 0.0);
    CHECK(nci(std::vector<double>{0.1, 0.25}, pair, 0.2) == 1.0);
    // Isolated agents are skipped: only agents 0 and 1 count.
    auto const partial = Graph::from_edges(3, std::vector<Edge>{{0, 1}});
    CHECK(nci(std::vector<double>{0.0, 0.5, 0.0}, partial, 0.2) == 0.0);
    CHECK_THROWS_AS(nci(std::vector<double>{0.0, 0.0}, Graph::from_edges(2, std::vector<Edge>{}), 0.2), DomainError);
    CHECK_THROWS_AS(nci(std::vector<double>{0.0, 0.0}, pair, 0.0), DomainError);
}

TEST_CASE("indices are bounded and invariant under relabeling")
{
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        CounterRng rng(seed);
        auto const g = build_hcn(NetworkConfig{.total_nodes = 200, .edges_per_new_node = 3, .rng_seed = seed});
        auto const ops = random_values(rng, 200);
        std::vector<AgentId> perm(200);
        std::iota(perm.begin(), perm.end(), AgentId{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<double> permuted(200);
        for (AgentId i = 0; i < 200; ++i) {
            permuted[perm[i]] = ops[i];
        }
        auto const h = relabel(g, perm);

        double const pz = polarization(ops);
        double const gd = global_disagreement(ops, g);
        double const c = nci(ops, g);
        CHECK(pz == doctest::Approx(polarization(permuted)).epsilon(1e-12));
        CHECK(gd == doctest::Approx(global_disagreement(permuted, h)).epsilon(1e-12));
        CHECK(c == doctest::Approx(nci(permuted, h)).epsilon(1e-12));
        for (double v : {pz, gd, c}) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("series csv")
{
    std::istringstream in("step,mean_opinion,extra\n0,0.25,x\n1,-0.5,y\n3,1e-3,z\n");
    auto const s = read_series(in);
    CHECK(s.steps == std::vector<Step>{0, 1, 3});
    CHECK(s.values == std::vector<double>{0.25, -0.5, 1e-3});

    std::ostringstream out;
    write_series(out, s);
    std::istringstream back(out.str());
    auto const t = read_series(back);
    CHECK(t.steps == s.steps);
    CHECK(t.values == s.values);

    std::istringstream bad_header("time,value\n0,1\n");
    CHECK_THROWS(read_series(bad_header));
    std::istringstream not_increasing("step,mean_opinion\n1,0.1\n1,0.2\n");
    CHECK_THROWS(read_series(not_increasing));
    std::istringstream bad_number("step,mean_opinion\n0,abc\n");
    CHECK_THROWS(read_series(bad_number));
    CHECK_THROWS(load_series("/nonexistent/series.csv"));
}
