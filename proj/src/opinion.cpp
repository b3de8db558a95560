#include "rumorsim/opinion.hpp"

#include <cmath>
#include <cstdint>
#include <string>

#include "rumorsim/error.hpp"
#include "rumorsim/network.hpp"

namespace rumorsim {

void DeffuantParams::validate() const
{
    if (!(confidence_bound > 0.0 && confidence_bound <= 2.0)) {
        throw ConfigError("confidence bound must lie in (0, 2], got " + std::to_string(confidence_bound));
    }
    if (!(convergence_rate > 0.0 && convergence_rate <= 1.0)) {
        throw ConfigError("convergence rate must lie in (0, 1], got " + std::to_string(convergence_rate));
    }
}

std::vector<Message> select_influencers(AgentId self, double self_opinion, std::span<Message const> inbox,
                                        double epsilon)
{
    std::vector<Message> kept;
    for (auto const& m : inbox) {
        if (m.sender != self && std::abs(m.score - self_opinion) < epsilon) {
            kept.push_back(m);
        }
    }
    return kept;
}

double deffuant_update(double self_opinion, std::span<Message const> accepted, double alpha)
{
    if (accepted.empty()) {
        return self_opinion;
    }
    double sum = 0.0;
    for (auto const& m : accepted) {
        sum += alpha * (m.score - self_opinion);
    }
    return clamp_opinion(self_opinion + sum / static_cast<double>(accepted.size()));
}

namespace {

struct Pull {
    double sum = 0.0;
    std::size_t count = 0;

    void add(AgentId self, double o, std::span<Message const> inbox, DeffuantParams const& p) noexcept
    {
        for (auto const& m : inbox) {
            if (m.sender != self && std::abs(m.score - o) < p.confidence_bound) {
                sum += p.convergence_rate * (m.score - o);
                ++count;
            }
        }
    }
    double apply(double o) const noexcept { return count == 0 ? o : clamp_opinion(o + sum / static_cast<double>(count)); }
};

}  // namespace

double deffuant_step(AgentId self, double self_opinion, std::span<Message const> inbox, DeffuantParams params)
{
    Pull pull;
    pull.add(self, self_opinion, inbox, params);
    return pull.apply(self_opinion);
}

InboxSet InboxSet::from_lists(std::vector<std::vector<Message>> const& lists)
{
    InboxSet set(lists.size());
    std::size_t total = 0;
    for (auto const& l : lists) {
        total += l.size();
    }
    set.reserve_messages(total);
    for (auto const& l : lists) {
        for (auto const& m : l) {
            set.push(m);
        }
        set.close();
    }
    return set;
}

InboxSet gather_neighbor_messages(Graph const& g, std::span<double const> opinions)
{
    InboxSet set(g.node_count());
    set.reserve_messages(2 * g.edge_count());
    for (AgentId i = 0; i < g.node_count(); ++i) {
        for (AgentId j : g.neighbors(i)) {
            set.push({j, message_of(opinions[j])});
        }
        set.close();
    }
    return set;
}

void step_regular(std::span<double const> snapshot, std::span<DeffuantParams const> params,
                  InboxSet const& inboxes, std::span<std::uint8_t const> regular_mask,
                  std::span<double> out, std::span<Message const> broadcast)
{
    std::size_t const n = snapshot.size();
    if (inboxes.size() != n || out.size() != n || (params.size() != n && params.size() != 1)
        || (!regular_mask.empty() && regular_mask.size() != n)) {
        throw InterfaceError("step_regular: inconsistent sizes");
    }
#pragma omp parallel for schedule(static)
    for (std::int64_t ii = 0; ii < static_cast<std::int64_t>(n); ++ii) {
        auto const i = static_cast<std::size_t>(ii);
        if (!regular_mask.empty() && !regular_mask[i]) {
            out[i] = snapshot[i];
            continue;
        }
        DeffuantParams const& p = params.size() == 1 ? params[0] : params[i];
        auto const self = static_cast<AgentId>(i);
        Pull pull;
        pull.add(self, snapshot[i], inboxes[i], p);
        pull.add(self, snapshot[i], broadcast, p);
        out[i] = pull.apply(snapshot[i]);
    }
}

std::vector<double> step_regular(std::span<double const> snapshot, DeffuantParams params, InboxSet const& inboxes)
{
    std::vector<double> out(snapshot.size());
    step_regular(snapshot, std::span<DeffuantParams const>(&params, 1), inboxes, {}, out);
    return out;
}

}  // namespace rumorsim
