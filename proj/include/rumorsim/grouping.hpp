#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rumorsim/types.hpp"

namespace rumorsim {

class Graph;

struct ConfusionParams {
    double beta = 0.5;               ///< weight of the similarity term
    double threshold = 0.5;          ///< tau must exceed this to be core
    std::size_t min_neighbors = 5;   ///< degree floor for core agents
    std::size_t max_core = 100;      ///< per-step core budget

    void validate() const;
};

struct AgentPartition {
    std::vector<AgentId> core_ids;     ///< ascending
    std::vector<AgentId> regular_ids;  ///< ascending
    std::vector<double> tau;           ///< -inf for isolated agents
    std::vector<std::uint8_t> is_core; ///< per-agent flag

    std::size_t agent_count() const noexcept { return is_core.size(); }
};

/// Mean of 1 - |o_j - o_i| / 2 over neighbors. Throws DomainError for isolated nodes.
double similarity(AgentId i, std::span<double const> opinions, Graph const& g);

/// Population standard deviation of neighbor opinions. Throws DomainError for isolated nodes.
double diversity(AgentId i, std::span<double const> opinions, Graph const& g);

/// Information confusion index: e^d - beta * e^s.
double confusion(double s, double d, double beta) noexcept;

/// tau for every agent; isolated agents get -inf.
std::vector<double> confusion_indices(std::span<double const> opinions, Graph const& g, double beta);

/*!
 * Core = agents with tau > threshold and degree >= min_neighbors, keeping the
 * max_core largest tau values (ties to the lower id). Everyone else is regular.
 */
AgentPartition partition_agents(std::span<double const> opinions, Graph const& g, ConfusionParams const& params);

/// Build a partition from an explicit core list (sorted and deduplicated here).
AgentPartition partition_from_core(std::size_t agent_count, std::vector<AgentId> core_ids,
                                   std::vector<double> tau = {});

}  // namespace rumorsim
