#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "rumorsim/driver.hpp"
#include "rumorsim/grouping.hpp"
#include "rumorsim/memory.hpp"
#include "rumorsim/opinion.hpp"

namespace rumorsim {

class Graph;

/// Text a core agent put on its timeline this step.
struct Emission {
    TweetId tweet = kNoTweet;
    ContentPtr content;
    std::optional<double> score;  ///< opinion score of content; filled by routing when missing
};

/// A text message received from a core neighbor.
struct CoreMessage {
    AgentId sender = 0;
    TweetId tweet = kNoTweet;
    ContentPtr content;
    double score = 0.0;
    Step step = 0;
};

struct RoutedMessages {
    /// Numeric inbox of every agent, sorted by sender: regular neighbors send
    /// their opinion, emitting core neighbors send the score of their content.
    InboxSet numeric;
    /// Texts from emitting core neighbors, for every agent, sorted by sender.
    std::vector<std::vector<CoreMessage>> texts;
    /// Senders whose emission was dropped because scoring failed.
    std::vector<AgentId> dropped;
};

/*!
 * Route one step of messages along graph edges.
 *
 * Regular agents emit message_of(opinion) to every neighbor. Core agents emit
 * only when they produced content; core neighbors receive the text with its
 * score, regular neighbors receive the score as a numeric message. emissions
 * is indexed by agent id and must be empty for regular agents.
 */
RoutedMessages route_messages(AgentPartition const& partition, Graph const& g,
                              std::vector<std::optional<Emission>>& emissions, std::span<double const> opinions,
                              Driver& driver, Step now);

/// Up to the 10 most recent neighbor texts with anonymous labels, plus sign
/// counts over all texts and numeric messages.
NeighborDigest digest_for_core(AgentId core_id, std::span<CoreMessage const> texts,
                               std::span<Message const> numeric = {});

inline constexpr std::size_t kDigestTextLimit = 10;

}  // namespace rumorsim
