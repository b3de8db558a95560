#include "rumorsim/grouping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rumorsim/error.hpp"
#include "rumorsim/network.hpp"

namespace rumorsim {

void ConfusionParams::validate() const
{
    if (!(beta >= 0.0)) {
        throw ConfigError("beta must be non-negative");
    }
    if (min_neighbors < 1) {
        throw ConfigError("min_neighbors must be at least 1");
    }
    if (!std::isfinite(threshold)) {
        throw ConfigError("threshold must be finite");
    }
}

double similarity(AgentId i, std::span<double const> opinions, Graph const& g)
{
    auto nb = g.neighbors(i);
    if (nb.empty()) {
        throw DomainError("similarity undefined for isolated agent " + std::to_string(i));
    }
    double sum = 0.0;
    for (AgentId j : nb) {
        sum += 1.0 - std::abs(opinions[j] - opinions[i]) / 2.0;
    }
    return sum / static_cast<double>(nb.size());
}

double diversity(AgentId i, std::span<double const> opinions, Graph const& g)
{
    auto nb = g.neighbors(i);
    if (nb.empty()) {
        throw DomainError("diversity undefined for isolated agent " + std::to_string(i));
    }
    double mean = 0.0;
    for (AgentId j : nb) {
        mean += opinions[j];
    }
    mean /= static_cast<double>(nb.size());
    double var = 0.0;
    for (AgentId j : nb) {
        var += (opinions[j] - mean) * (opinions[j] - mean);
    }
    return std::sqrt(var / static_cast<double>(nb.size()));
}

double confusion(double s, double d, double beta) noexcept
{
    return std::exp(d) - beta * std::exp(s);
}

std::vector<double> confusion_indices(std::span<double const> opinions, Graph const& g, double beta)
{
    std::size_t const n = g.node_count();
    if (opinions.size() != n) {
        throw InterfaceError("confusion_indices: opinion count does not match graph");
    }
    std::vector<double> tau(n, -std::numeric_limits<double>::infinity());
#pragma omp parallel for schedule(dynamic, 1024)
    for (std::int64_t ii = 0; ii < static_cast<std::int64_t>(n); ++ii) {
        auto const i = static_cast<AgentId>(ii);
        if (g.degree(i) == 0) {
            continue;
        }
        tau[i] = confusion(similarity(i, opinions, g), diversity(i, opinions, g), beta);
    }
    return tau;
}

AgentPartition partition_from_core(std::size_t agent_count, std::vector<AgentId> core_ids, std::vector<double> tau)
{
    std::sort(core_ids.begin(), core_ids.end());
    core_ids.erase(std::unique(core_ids.begin(), core_ids.end()), core_ids.end());
    AgentPartition p;
    p.is_core.assign(agent_count, 0);
    for (AgentId id : core_ids) {
        if (id >= agent_count) {
            throw InterfaceError("core id out of range");
        }
        p.is_core[id] = 1;
    }
    p.regular_ids.reserve(agent_count - core_ids.size());
    for (AgentId i = 0; i < agent_count; ++i) {
        if (!p.is_core[i]) {
            p.regular_ids.push_back(i);
        }
    }
    p.core_ids = std::move(core_ids);
    p.tau = std::move(tau);
    return p;
}

AgentPartition partition_agents(std::span<double const> opinions, Graph const& g, ConfusionParams const& params)
{
    params.validate();
    auto tau = confusion_indices(opinions, g, params.beta);
    std::vector<AgentId> candidates;
    for (AgentId i = 0; i < g.node_count(); ++i) {
        if (g.degree(i) >= params.min_neighbors && tau[i] > params.threshold) {
            candidates.push_back(i);
        }
    }
    auto const by_tau = [&](AgentId a, AgentId b) { return tau[a] > tau[b] || (tau[a] == tau[b] && a < b); };
    if (candidates.size() > params.max_core) {
        std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(params.max_core),
                          candidates.end(), by_tau);
        candidates.resize(params.max_core);
    }
    return partition_from_core(g.node_count(), std::move(candidates), std::move(tau));
}

}  // namespace rumorsim
