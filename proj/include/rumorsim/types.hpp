#pragma once

#include <cstdint>
#include <limits>

namespace rumorsim {

using AgentId = std::uint32_t;
using Step = std::int64_t;
using TweetId = std::uint64_t;

/// Sender id used for global events and broadcast interventions.
inline constexpr AgentId kGlobalSender = std::numeric_limits<AgentId>::max();

/// Tweet id 0 means "no tweet".
inline constexpr TweetId kNoTweet = 0;

}  // namespace rumorsim
