#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rumorsim/types.hpp"

namespace rumorsim {

using Edge = std::pair<AgentId, AgentId>;

/*!
 * Undirected simple graph in compressed sparse row form.
 *
 * Neighbor lists are sorted and duplicate free; the structure is immutable
 * after construction so analysis routines may share it across threads.
 */
class Graph {
  public:
    Graph() = default;

    /// Build from an undirected edge list. Throws ConfigError on self-loops,
    /// duplicate edges or out-of-range endpoints.
    static Graph from_edges(std::size_t node_count, std::span<Edge const> edges);

    /// Build from per-node neighbor lists (need not be sorted). The lists must
    /// already be symmetric; self-loops and duplicates are rejected.
    static Graph from_adjacency(std::vector<std::vector<AgentId>> adjacency);

    std::size_t node_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::size_t edge_count() const noexcept { return neighbors_.size() / 2; }

    std::size_t degree(AgentId i) const noexcept { return offsets_[i + 1] - offsets_[i]; }

    std::span<AgentId const> neighbors(AgentId i) const noexcept
    {
        return {neighbors_.data() + offsets_[i], degree(i)};
    }

    bool has_edge(AgentId i, AgentId j) const noexcept;

    /// All edges as (i, j) with i < j, in lexicographic order.
    std::vector<Edge> edges() const;

    friend bool operator==(Graph const&, Graph const&) = default;

  private:
    std::vector<std::size_t> offsets_;
    std::vector<AgentId> neighbors_;
};

/// Returns a description of the first violated invariant, or nothing.
std::optional<std::string> find_invariant_violation(Graph const& g);

struct NetworkConfig {
    std::size_t total_nodes = 10'000;
    std::size_t edges_per_new_node = 4;
    double preferential_probability = 0.8;
    std::size_t seed_clique_size = 5;
    std::uint64_t rng_seed = 42;

    /// max(m + 1, 5), the default seed clique for a given m.
    static std::size_t default_seed_clique(std::size_t m) noexcept { return std::max<std::size_t>(m + 1, 5); }

    void validate() const;
};

/// Number of edges build_hcn produces for the configuration.
std::size_t hcn_edge_count(NetworkConfig const& config) noexcept;

/*!
 * Hierarchical collaborative network: complete seed graph, then growth where
 * each edge slot is either degree-preferential (probability p) or a triadic
 * closure step (uniform node, then one of its neighbors).
 */
Graph build_hcn(NetworkConfig const& config);

/// Uniform random simple graph with exactly target_edges edges.
Graph build_random(std::size_t node_count, std::size_t target_edges, std::uint64_t rng_seed);

/// Ring lattice: node i linked to its k/2 nearest ring neighbors on each side.
Graph build_regular(std::size_t node_count, std::size_t k, std::uint64_t rng_seed = 0);

/// Mean local clustering; nodes with degree < 2 contribute 0.
double clustering_coefficient(Graph const& g);

/// Mean BFS distance over sampled pairs inside the largest component. When
/// sample_pairs covers every pair, all pairs are used.
double avg_path_length_sampled(Graph const& g, std::size_t sample_pairs, std::uint64_t rng_seed);

/// Node ids of the largest connected component, ascending.
std::vector<AgentId> largest_component(Graph const& g);

struct DegreeStats {
    std::map<std::size_t, std::size_t> histogram;
    std::optional<double> powerlaw_exponent;
    std::optional<double> fit_r2;
};

/// Degree histogram plus a log-log least-squares fit over degrees >= min_degree
/// (skipped when fewer than 5 distinct degrees qualify).
DegreeStats degree_stats(Graph const& g, std::size_t min_degree = 1);

/// `hcn-graph v1 <N>` header, then one `i j` line per edge with i < j.
void write_graph(std::ostream& out, Graph const& g);
Graph read_graph(std::istream& in);
void save_graph(std::string const& path, Graph const& g);
Graph load_graph(std::string const& path);

}  // namespace rumorsim
