#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "rumorsim/types.hpp"

namespace rumorsim {

class Graph;

/// Opinions live in [-1, 1]; the sign is belief in the rumor, the magnitude its strength.
inline double clamp_opinion(double o) noexcept { return std::clamp(o, -1.0, 1.0); }

struct DeffuantParams {
    double confidence_bound = 1.0;  ///< epsilon, in (0, 2]
    double convergence_rate = 0.5;  ///< alpha, in (0, 1]

    void validate() const;
    friend bool operator==(DeffuantParams const&, DeffuantParams const&) = default;
};

struct Message {
    AgentId sender = 0;
    double score = 0.0;
    friend bool operator==(Message const&, Message const&) = default;
};

/// The message an agent emits: its opinion, unchanged.
constexpr double message_of(double opinion) noexcept { return opinion; }

/// Messages with |score - self_opinion| < epsilon, excluding the agent's own.
std::vector<Message> select_influencers(AgentId self, double self_opinion, std::span<Message const> inbox,
                                        double epsilon);

/// Mean assimilation toward the accepted messages; unchanged when none were accepted.
double deffuant_update(double self_opinion, std::span<Message const> accepted, double alpha);

/// Fused select + update without materializing the accepted set.
double deffuant_step(AgentId self, double self_opinion, std::span<Message const> inbox, DeffuantParams params);

/*!
 * Per-agent inboxes in one flat buffer.
 *
 * Built agent by agent in id order; inbox(i) is a view into the buffer.
 */
class InboxSet {
  public:
    InboxSet() = default;
    explicit InboxSet(std::size_t agents) { offsets_.reserve(agents + 1); offsets_.push_back(0); }

    void reserve_messages(std::size_t n) { messages_.reserve(n); }

    /// Append to the inbox currently being filled.
    void push(Message m) { messages_.push_back(m); }

    /// Close the current inbox and start the next agent's.
    void close() { offsets_.push_back(messages_.size()); }

    std::size_t size() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }

    std::span<Message const> operator[](std::size_t i) const noexcept
    {
        return {messages_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
    }

    std::size_t total_messages() const noexcept { return messages_.size(); }

    /// Assemble from separately built per-agent lists.
    static InboxSet from_lists(std::vector<std::vector<Message>> const& lists);

  private:
    std::vector<std::size_t> offsets_;
    std::vector<Message> messages_;
};

/// Every neighbor's message_of(opinion), sorted by sender id.
InboxSet gather_neighbor_messages(Graph const& g, std::span<double const> opinions);

/*!
 * Synchronous Deffuant step: every agent flagged regular is updated from the
 * frozen snapshot and its own inbox. Entries of agents not flagged regular are
 * copied unchanged. An empty mask means everyone is regular. broadcast
 * messages are delivered to every regular agent on top of its inbox.
 */
void step_regular(std::span<double const> snapshot, std::span<DeffuantParams const> params,
                  InboxSet const& inboxes, std::span<std::uint8_t const> regular_mask,
                  std::span<double> out, std::span<Message const> broadcast = {});

/// Convenience overload with homogeneous parameters and everyone regular.
std::vector<double> step_regular(std::span<double const> snapshot, DeffuantParams params, InboxSet const& inboxes);

}  // namespace rumorsim
