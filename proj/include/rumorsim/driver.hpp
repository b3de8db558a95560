#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rumorsim/error.hpp"
#include "rumorsim/memory.hpp"
#include "rumorsim/persona.hpp"
#include "rumorsim/types.hpp"

namespace rumorsim {

enum class ActionKind : std::uint8_t { post = 0, retweet = 1, reply = 2, like = 3, do_nothing = 4 };

std::string_view to_string(ActionKind kind) noexcept;
std::optional<ActionKind> parse_action_kind(std::string_view name) noexcept;

struct Action {
    ActionKind kind = ActionKind::do_nothing;
    std::string content;                 ///< empty for like / do_nothing
    std::optional<TweetId> target;       ///< required for retweet, reply, like
    std::optional<double> opinion_score; ///< score of content, when the driver supplies it

    static Action nothing() { return {}; }
    bool has_content() const noexcept { return !content.empty(); }
};

/// Post/Reply carry content; Retweet/Reply/Like reference a tweet.
bool is_valid(Action const& a) noexcept;

/// What a core agent heard from its neighbors, ready for a prompt.
struct NeighborDigest {
    std::string text;
    std::size_t positive = 0;
    std::size_t negative = 0;
    std::size_t count = 0;       ///< all messages, texts and numeric
    double mean_score = 0.0;     ///< over all messages; 0 when count is 0

    bool empty() const noexcept { return count == 0; }
};

struct ActionRequest {
    Persona const& persona;
    double opinion;
    std::span<MemoryRecord const> memories;
    std::string_view environment;
    NeighborDigest const& digest;
    Step now;
    std::uint64_t seed;  ///< per-agent per-step stream key
};

/*!
 * The reasoning backend behind core agents.
 *
 * Implementations must be safe to call from several threads at once. A
 * DriverUnavailable error is fatal to a run; any other DriverError is handled
 * locally (the action becomes DoNothing, the reflection is skipped).
 */
class Driver {
  public:
    virtual ~Driver() = default;

    virtual Action generate_action(ActionRequest const& request) = 0;
    /// Opinion expressed by a text, clamped to [-1, 1].
    virtual double score_opinion(std::string_view text) = 0;
    /// Importance of a text, clamped to [1, 10].
    virtual double score_importance(std::string_view text) = 0;
    virtual std::vector<std::string> generate_questions(std::span<MemoryRecord const> recent) = 0;
    virtual std::vector<std::string> reflect(std::span<std::string const> questions,
                                             std::span<MemoryRecord const> memories) = 0;
    /// 3 to 5 interest tags for a persona.
    virtual std::vector<std::string> infer_interests(Persona const& persona, std::uint64_t seed) = 0;
};

/// Transport-level failure after the retry budget; aborts the run.
class DriverUnavailable : public DriverError {
  public:
    using DriverError::DriverError;
};

struct ScriptedDriverParams {
    double base_window = 1.0;  ///< acceptance window before widening by openness
    double base_rate = 0.3;    ///< pull rate before damping by conscientiousness
};

/*!
 * Deterministic rule-based driver.
 *
 * Texts carry stance through a fixed phrase lexicon; generated content uses
 * templates keyed by sign and magnitude tercile, so score_opinion of any
 * generated text is the tercile's midpoint (+-1/6, +-1/2, +-5/6).
 */
class ScriptedDriver final : public Driver {
  public:
    explicit ScriptedDriver(ScriptedDriverParams params = {}) : params_(params) {}

    Action generate_action(ActionRequest const& request) override;
    double score_opinion(std::string_view text) override;
    double score_importance(std::string_view text) override;
    std::vector<std::string> generate_questions(std::span<MemoryRecord const> recent) override;
    std::vector<std::string> reflect(std::span<std::string const> questions,
                                     std::span<MemoryRecord const> memories) override;
    std::vector<std::string> infer_interests(Persona const& persona, std::uint64_t seed) override;

    /// Template text expressing the given opinion; variant picks among phrasings.
    static std::string render(double opinion, std::uint64_t variant);
    /// Lexicon score of a text (0 when no stance phrase occurs).
    static double lexicon_score(std::string_view text);

    ScriptedDriverParams const& params() const noexcept { return params_; }

  private:
    ScriptedDriverParams params_;
};

}  // namespace rumorsim
