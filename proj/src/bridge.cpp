#include "rumorsim/bridge.hpp"

#include <algorithm>
#include <iostream>
#include <sstream>

#include "rumorsim/network.hpp"

namespace rumorsim {

RoutedMessages route_messages(AgentPartition const& partition, Graph const& g,
                              std::vector<std::optional<Emission>>& emissions, std::span<double const> opinions,
                              Driver& driver, Step now)
{
    std::size_t const n = g.node_count();
    if (partition.agent_count() != n || emissions.size() != n || opinions.size() != n) {
        throw InterfaceError("route_messages: inconsistent sizes");
    }
    RoutedMessages routed;
    for (AgentId id = 0; id < n; ++id) {
        auto& e = emissions[id];
        if (!e) {
            continue;
        }
        if (!partition.is_core[id]) {
            throw InterfaceError("emission from regular agent " + std::to_string(id));
        }
        if (!e->score) {
            try {
                e->score = clamp_opinion(driver.score_opinion(e->content->text));
            } catch (DriverUnavailable const&) {
                throw;
            } catch (DriverError const& err) {
                std::clog << "warning: dropping messages of agent " << id << ": " << err.what() << '\n';
                routed.dropped.push_back(id);
                e.reset();
            }
        }
    }

    // Pull model: each recipient scans its own neighbor list, so inboxes come
    // out sorted by sender and can be filled in parallel.
    std::vector<std::size_t> counts(n, 0);
#pragma omp parallel for schedule(dynamic, 1024)
    for (std::int64_t ii = 0; ii < static_cast<std::int64_t>(n); ++ii) {
        std::size_t c = 0;
        for (AgentId j : g.neighbors(static_cast<AgentId>(ii))) {
            c += !partition.is_core[j] || emissions[j].has_value();
        }
        counts[ii] = c;
    }
    std::vector<std::size_t> offsets(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        offsets[i + 1] = offsets[i] + counts[i];
    }
    std::vector<Message> flat(offsets[n]);
    routed.texts.resize(n);
#pragma omp parallel for schedule(dynamic, 1024)
    for (std::int64_t ii = 0; ii < static_cast<std::int64_t>(n); ++ii) {
        auto const i = static_cast<AgentId>(ii);
        std::size_t pos = offsets[i];
        for (AgentId j : g.neighbors(i)) {
            if (!partition.is_core[j]) {
                flat[pos++] = Message{j, message_of(opinions[j])};
            } else if (auto const& e = emissions[j]) {
                flat[pos++] = Message{j, *e->score};
                routed.texts[i].push_back(CoreMessage{j, e->tweet, e->content, *e->score, now});
            }
        }
    }
    routed.numeric = InboxSet(n);
    routed.numeric.reserve_messages(flat.size());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) {
            routed.numeric.push(flat[k]);
        }
        routed.numeric.close();
    }
    return routed;
}

NeighborDigest digest_for_core(AgentId core_id, std::span<CoreMessage const> texts, std::span<Message const> numeric)
{
    NeighborDigest d;
    double sum = 0.0;
    auto const tally = [&](double score) {
        d.positive += score > 0.0;
        d.negative += score < 0.0;
        sum += score;
        ++d.count;
    };
    std::vector<CoreMessage const*> shown;
    for (auto const& m : texts) {
        if (m.sender == core_id) {
            continue;
        }
        tally(m.score);
        shown.push_back(&m);
    }
    for (auto const& m : numeric) {
        if (m.sender != core_id) {
            tally(m.score);
        }
    }
    if (d.count == 0) {
        return d;
    }
    d.mean_score = sum / static_cast<double>(d.count);

    // Newest first; equal steps keep inbox order.
    std::stable_sort(shown.begin(), shown.end(), [](auto* a, auto* b) { return a->step > b->step; });
    if (shown.size() > kDigestTextLimit) {
        shown.resize(kDigestTextLimit);
    }
    std::ostringstream os;
    for (std::size_t k = 0; k < shown.size(); ++k) {
        os << "Neighbor " << (k + 1) << ": " << shown[k]->content->text << '\n';
    }
    os << "Sentiment: " << d.positive << " positive, " << d.negative << " negative";
    d.text = os.str();
    return d;
}

}  // namespace rumorsim
