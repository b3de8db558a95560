#include "rumorsim/driver.hpp"

namespace rumorsim {

std::string_view to_string(ActionKind kind) noexcept
{
    switch (kind) {
    case ActionKind::post:
        return "post";
    case ActionKind::retweet:
        return "retweet";
    case ActionKind::reply:
        return "reply";
    case ActionKind::like:
        return "like";
    case ActionKind::do_nothing:
        return "do_nothing";
    }
    return "unknown";
}

std::optional<ActionKind> parse_action_kind(std::string_view name) noexcept
{
    for (auto k : {ActionKind::post, ActionKind::retweet, ActionKind::reply, ActionKind::like,
                   ActionKind::do_nothing}) {
        if (name == to_string(k)) {
            return k;
        }
    }
    if (name == "nothing" || name == "none" || name == "do nothing") {
        return ActionKind::do_nothing;
    }
    return std::nullopt;
}

bool is_valid(Action const& a) noexcept
{
    switch (a.kind) {
    case ActionKind::post:
        return a.has_content();
    case ActionKind::reply:
        return a.has_content() && a.target && *a.target != kNoTweet;
    case ActionKind::retweet:
        return a.target && *a.target != kNoTweet;
    case ActionKind::like:
        return a.target && *a.target != kNoTweet && !a.has_content();
    case ActionKind::do_nothing:
        return !a.has_content();
    }
    return false;
}

}  // namespace rumorsim
