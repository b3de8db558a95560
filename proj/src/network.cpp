#include "rumorsim/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <queue>
#include <sstream>
#include <unordered_set>

#include "rumorsim/error.hpp"
#include "rumorsim/rng.hpp"

namespace rumorsim {

namespace {

constexpr int kMaxRedraws = 100;

bool contains(std::vector<AgentId> const& v, AgentId x)
{
    return std::find(v.begin(), v.end(), x) != v.end();
}

void sort_and_check(std::vector<AgentId>& list, AgentId owner)
{
    std::sort(list.begin(), list.end());
    if (std::adjacent_find(list.begin(), list.end()) != list.end()) {
        throw ConfigError("duplicate edge at node " + std::to_string(owner));
    }
    if (std::binary_search(list.begin(), list.end(), owner)) {
        throw ConfigError("self-loop at node " + std::to_string(owner));
    }
}

// Breadth-first distances from source; unreachable nodes keep -1.
void bfs(Graph const& g, AgentId source, std::vector<std::int32_t>& dist, std::vector<AgentId>& queue)
{
    std::fill(dist.begin(), dist.end(), -1);
    queue.clear();
    queue.push_back(source);
    dist[source] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        AgentId const u = queue[head];
        for (AgentId v : g.neighbors(u)) {
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
}

}  // namespace

//---------------------------------------------------------------------------//
// Graph
//---------------------------------------------------------------------------//

Graph Graph::from_edges(std::size_t node_count, std::span<Edge const> edges)
{
    std::vector<std::vector<AgentId>> adjacency(node_count);
    for (auto [i, j] : edges) {
        if (i >= node_count || j >= node_count) {
            throw ConfigError("edge endpoint out of range: " + std::to_string(i) + " " + std::to_string(j));
        }
        if (i == j) {
            throw ConfigError("self-loop at node " + std::to_string(i));
        }
        adjacency[i].push_back(j);
        adjacency[j].push_back(i);
    }
    return from_adjacency(std::move(adjacency));
}

Graph Graph::from_adjacency(std::vector<std::vector<AgentId>> adjacency)
{
    Graph g;
    g.offsets_.resize(adjacency.size() + 1, 0);
    for (std::size_t i = 0; i < adjacency.size(); ++i) {
        sort_and_check(adjacency[i], static_cast<AgentId>(i));
        g.offsets_[i + 1] = g.offsets_[i] + adjacency[i].size();
    }
    g.neighbors_.reserve(g.offsets_.back());
    for (auto& list : adjacency) {
        g.neighbors_.insert(g.neighbors_.end(), list.begin(), list.end());
        std::vector<AgentId>().swap(list);
    }
    if (g.neighbors_.size() % 2 != 0) {
        throw ConfigError("adjacency lists are not symmetric");
    }
    return g;
}

bool Graph::has_edge(AgentId i, AgentId j) const noexcept
{
    auto nb = neighbors(i);
    return std::binary_search(nb.begin(), nb.end(), j);
}

std::vector<Edge> Graph::edges() const
{
    std::vector<Edge> out;
    out.reserve(edge_count());
    for (AgentId i = 0; i < node_count(); ++i) {
        for (AgentId j : neighbors(i)) {
            if (i < j) {
                out.emplace_back(i, j);
            }
        }
    }
    return out;
}

std::optional<std::string> find_invariant_violation(Graph const& g)
{
    for (AgentId i = 0; i < g.node_count(); ++i) {
        auto nb = g.neighbors(i);
        for (std::size_t k = 0; k < nb.size(); ++k) {
            AgentId const j = nb[k];
            if (j >= g.node_count()) {
                return "neighbor out of range at node " + std::to_string(i);
            }
            if (j == i) {
                return "self-loop at node " + std::to_string(i);
            }
            if (k > 0 && nb[k - 1] >= j) {
                return "neighbor list of node " + std::to_string(i) + " not strictly increasing";
            }
            if (!g.has_edge(j, i)) {
                return "asymmetric edge " + std::to_string(i) + "->" + std::to_string(j);
            }
        }
    }
    return std::nullopt;
}

//---------------------------------------------------------------------------//
// Generators
//---------------------------------------------------------------------------//

void NetworkConfig::validate() const
{
    if (seed_clique_size < edges_per_new_node + 1) {
        throw ConfigError("seed clique size must be at least m + 1");
    }
    if (total_nodes < seed_clique_size) {
        throw ConfigError("total nodes must be at least the seed clique size");
    }
    if (!(preferential_probability >= 0.0 && preferential_probability <= 1.0)) {
        throw ConfigError("preferential probability must lie in [0, 1]");
    }
    if (total_nodes > std::numeric_limits<AgentId>::max()) {
        throw ConfigError("too many nodes");
    }
}

std::size_t hcn_edge_count(NetworkConfig const& config) noexcept
{
    std::size_t const n0 = config.seed_clique_size;
    return n0 * (n0 - 1) / 2 + config.edges_per_new_node * (config.total_nodes - n0);
}

Graph build_hcn(NetworkConfig const& config)
{
    config.validate();
    std::size_t const n = config.total_nodes;
    std::size_t const n0 = config.seed_clique_size;
    std::size_t const m = config.edges_per_new_node;

    CounterRng rng = derive_stream(config.rng_seed, StreamPurpose::network);
    std::vector<std::vector<AgentId>> adjacency(n);
    // Each edge contributes both endpoints, so a uniform pick is degree-proportional.
    std::vector<AgentId> endpoints;
    endpoints.reserve(2 * hcn_edge_count(config));

    for (AgentId i = 0; i < n0; ++i) {
        for (AgentId j = i + 1; j < n0; ++j) {
            adjacency[i].push_back(j);
            adjacency[j].push_back(i);
            endpoints.push_back(i);
            endpoints.push_back(j);
        }
    }

    std::vector<AgentId> targets;
    targets.reserve(m);
    std::vector<AgentId> candidates;

    for (std::size_t t = n0; t < n; ++t) {
        targets.clear();

        auto uniform_fresh = [&]() {
            AgentId v;
            do {
                v = static_cast<AgentId>(rng.below(t));
            } while (contains(targets, v));
            return v;
        };

        auto preferential = [&]() {
            for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
                AgentId const v = endpoints[rng.below(endpoints.size())];
                if (!contains(targets, v)) {
                    return v;
                }
            }
            return uniform_fresh();
        };

        while (targets.size() < m) {
            if (rng.bernoulli(config.preferential_probability)) {
                targets.push_back(preferential());
                continue;
            }
            // Triadic closure: link a uniform node, then one of its neighbors.
            AgentId const anchor = static_cast<AgentId>(rng.below(t));
            if (!contains(targets, anchor)) {
                targets.push_back(anchor);
                if (targets.size() == m) {
                    break;
                }
            }
            candidates.clear();
            for (AgentId v : adjacency[anchor]) {
                if (!contains(targets, v)) {
                    candidates.push_back(v);
                }
            }
            if (candidates.empty()) {
                targets.push_back(preferential());
            } else {
                targets.push_back(candidates[rng.below(candidates.size())]);
            }
        }

        auto const self = static_cast<AgentId>(t);
        for (AgentId v : targets) {
            adjacency[self].push_back(v);
            adjacency[v].push_back(self);
            endpoints.push_back(self);
            endpoints.push_back(v);
        }
    }
    std::vector<AgentId>().swap(endpoints);
    return Graph::from_adjacency(std::move(adjacency));
}

Graph build_random(std::size_t node_count, std::size_t target_edges, std::uint64_t rng_seed)
{
    std::size_t const max_edges = node_count < 2 ? 0 : node_count * (node_count - 1) / 2;
    if (target_edges > max_edges) {
        throw ConfigError("infeasible edge count " + std::to_string(target_edges) + " for "
                          + std::to_string(node_count) + " nodes");
    }
    CounterRng rng = derive_stream(rng_seed, StreamPurpose::network);
    // Dense requests sample the complement instead.
    bool const complement = target_edges > max_edges / 2;
    std::size_t const draws = complement ? max_edges - target_edges : target_edges;

    std::unordered_set<std::uint64_t> chosen;
    chosen.reserve(draws * 2);
    std::vector<Edge> picked;
    picked.reserve(draws);
    while (picked.size() < draws) {
        auto a = static_cast<AgentId>(rng.below(node_count));
        auto b = static_cast<AgentId>(rng.below(node_count));
        if (a == b) {
            continue;
        }
        if (a > b) {
            std::swap(a, b);
        }
        if (chosen.insert(static_cast<std::uint64_t>(a) * node_count + b).second) {
            picked.emplace_back(a, b);
        }
    }
    if (!complement) {
        return Graph::from_edges(node_count, picked);
    }
    std::vector<Edge> edges;
    edges.reserve(target_edges);
    for (AgentId a = 0; a < node_count; ++a) {
        for (AgentId b = a + 1; b < node_count; ++b) {
            if (!chosen.count(static_cast<std::uint64_t>(a) * node_count + b)) {
                edges.emplace_back(a, b);
            }
        }
    }
    return Graph::from_edges(node_count, edges);
}

Graph build_regular(std::size_t node_count, std::size_t k, std::uint64_t /*rng_seed*/)
{
    if (k % 2 != 0) {
        throw ConfigError("ring lattice degree must be even");
    }
    if (k >= node_count) {
        throw ConfigError("ring lattice degree must be below the node count");
    }
    std::vector<Edge> edges;
    edges.reserve(node_count * k / 2);
    for (std::size_t i = 0; i < node_count; ++i) {
        for (std::size_t d = 1; d <= k / 2; ++d) {
            edges.emplace_back(static_cast<AgentId>(i), static_cast<AgentId>((i + d) % node_count));
        }
    }
    return Graph::from_edges(node_count, edges);
}

//---------------------------------------------------------------------------//
// Analysis
//---------------------------------------------------------------------------//

double clustering_coefficient(Graph const& g)
{
    std::size_t const n = g.node_count();
    if (n == 0) {
        return 0.0;
    }
    std::vector<double> local(n, 0.0);
#pragma omp parallel for schedule(dynamic, 256)
    for (std::int64_t ui = 0; ui < static_cast<std::int64_t>(n); ++ui) {
        auto const u = static_cast<AgentId>(ui);
        auto nu = g.neighbors(u);
        std::size_t const k = nu.size();
        if (k < 2) {
            continue;
        }
        std::size_t links = 0;
        for (AgentId v : nu) {
            auto nv = g.neighbors(v);
            // Common neighbors w > v, so each linked neighbor pair is seen once.
            auto a = std::upper_bound(nu.begin(), nu.end(), v);
            auto b = std::upper_bound(nv.begin(), nv.end(), v);
            while (a != nu.end() && b != nv.end()) {
                if (*a < *b) {
                    ++a;
                } else if (*b < *a) {
                    ++b;
                } else {
                    ++links;
                    ++a;
                    ++b;
                }
            }
        }
        local[u] = static_cast<double>(links) / (static_cast<double>(k) * (k - 1) / 2.0);
    }
    return std::accumulate(local.begin(), local.end(), 0.0) / static_cast<double>(n);
}

std::vector<AgentId> largest_component(Graph const& g)
{
    std::size_t const n = g.node_count();
    std::vector<std::int32_t> label(n, -1);
    std::vector<AgentId> queue;
    std::int32_t best_label = -1;
    std::size_t best_size = 0;
    std::int32_t next = 0;
    for (AgentId s = 0; s < n; ++s) {
        if (label[s] >= 0) {
            continue;
        }
        queue.clear();
        queue.push_back(s);
        label[s] = next;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            for (AgentId v : g.neighbors(queue[head])) {
                if (label[v] < 0) {
                    label[v] = next;
                    queue.push_back(v);
                }
            }
        }
        if (queue.size() > best_size) {
            best_size = queue.size();
            best_label = next;
        }
        ++next;
    }
    std::vector<AgentId> out;
    out.reserve(best_size);
    for (AgentId i = 0; i < n; ++i) {
        if (label[i] == best_label) {
            out.push_back(i);
        }
    }
    return out;
}

double avg_path_length_sampled(Graph const& g, std::size_t sample_pairs, std::uint64_t rng_seed)
{
    if (g.node_count() == 0) {
        throw DomainError("average path length of an empty graph");
    }
    if (sample_pairs == 0) {
        throw DomainError("at least one sample pair is required");
    }
    auto const component = largest_component(g);
    std::size_t const size = component.size();
    if (size < 2) {
        throw DomainError("largest component has no node pairs");
    }
    std::size_t const all_pairs = size * (size - 1) / 2;

    std::vector<std::int32_t> dist(g.node_count());
    std::vector<AgentId> queue;
    double total = 0.0;
    std::size_t counted = 0;

    if (sample_pairs >= all_pairs) {
        for (std::size_t a = 0; a < size; ++a) {
            bfs(g, component[a], dist, queue);
            for (std::size_t b = a + 1; b < size; ++b) {
                total += dist[component[b]];
                ++counted;
            }
        }
        return total / static_cast<double>(counted);
    }

    CounterRng rng = derive_stream(rng_seed, StreamPurpose::path_sampling);
    std::vector<std::pair<AgentId, AgentId>> pairs;
    pairs.reserve(sample_pairs);
    while (pairs.size() < sample_pairs) {
        AgentId const a = component[rng.below(size)];
        AgentId const b = component[rng.below(size)];
        if (a != b) {
            pairs.emplace_back(a, b);
        }
    }
    std::sort(pairs.begin(), pairs.end());
    AgentId current = kGlobalSender;
    for (auto [a, b] : pairs) {
        if (a != current) {
            bfs(g, a, dist, queue);
            current = a;
        }
        total += dist[b];
        ++counted;
    }
    return total / static_cast<double>(counted);
}

DegreeStats degree_stats(Graph const& g, std::size_t min_degree)
{
    DegreeStats stats;
    for (AgentId i = 0; i < g.node_count(); ++i) {
        ++stats.histogram[g.degree(i)];
    }
    std::vector<double> xs;
    std::vector<double> ys;
    for (auto [k, count] : stats.histogram) {
        if (k >= std::max<std::size_t>(min_degree, 1) && count > 0) {
            xs.push_back(std::log10(static_cast<double>(k)));
            ys.push_back(std::log10(static_cast<double>(count)));
        }
    }
    if (xs.size() < 5) {
        return stats;
    }
    double const n = static_cast<double>(xs.size());
    double const mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double const my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    double const slope = sxy / sxx;
    double const intercept = my - slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double const r = ys[i] - (intercept + slope * xs[i]);
        ss_res += r * r;
    }
    stats.powerlaw_exponent = -slope;
    stats.fit_r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return stats;
}

//---------------------------------------------------------------------------//
// Serialization
//---------------------------------------------------------------------------//

void write_graph(std::ostream& out, Graph const& g)
{
    out << "hcn-graph v1 " << g.node_count() << '\n';
    for (AgentId i = 0; i < g.node_count(); ++i) {
        for (AgentId j : g.neighbors(i)) {
            if (i < j) {
                out << i << ' ' << j << '\n';
            }
        }
    }
}

Graph read_graph(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) {
        throw ConfigError("graph file is empty");
    }
    std::istringstream header(line);
    std::string magic;
    std::string version;
    long long n = -1;
    if (!(header >> magic >> version >> n) || magic != "hcn-graph" || n < 0) {
        throw ConfigError("bad graph header: '" + line + "'");
    }
    if (version != "v1") {
        throw ConfigError("unsupported graph format version " + version);
    }
    std::vector<Edge> edges;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::istringstream row(line);
        long long i = -1;
        long long j = -1;
        std::string rest;
        if (!(row >> i >> j) || (row >> rest) || i < 0 || j < 0) {
            throw ConfigError("bad edge on line " + std::to_string(line_no));
        }
        edges.emplace_back(static_cast<AgentId>(i), static_cast<AgentId>(j));
    }
    return Graph::from_edges(static_cast<std::size_t>(n), edges);
}

void save_graph(std::string const& path, Graph const& g)
{
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("cannot write graph file " + path);
    }
    write_graph(out, g);
}

Graph load_graph(std::string const& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open graph file " + path);
    }
    return read_graph(in);
}

}  // namespace rumorsim
