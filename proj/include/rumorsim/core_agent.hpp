#pragma once

#include <cstddef>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

#include "rumorsim/driver.hpp"
#include "rumorsim/memory.hpp"
#include "rumorsim/persona.hpp"

namespace rumorsim {

struct MemoryParams {
    std::size_t retrieval_k = 10;
    double decay = 0.9;
    std::size_t reflection_recent = 10;  ///< recent records fed to question generation
};

/*!
 * Memoized embedding and scoring of texts.
 *
 * Both the embedder and the scripted driver are pure functions of the text,
 * so memoizing does not change results; it keeps the number of embeddings
 * and remote scoring calls proportional to distinct texts. Thread-safe.
 */
class ContentCache {
  public:
    ContentCache(Embedder const& embedder, Driver& driver) : embedder_(embedder), driver_(driver) {}

    ContentPtr content(std::string_view text);
    double importance(std::string_view text);
    double opinion(std::string_view text);

    /// Seed the content table, e.g. from a checkpoint.
    void insert(ContentPtr content);

    Embedder const& embedder() const noexcept { return embedder_; }
    Driver& driver() const noexcept { return driver_; }

  private:
    struct Entry {
        ContentPtr content;
        std::optional<double> importance;
        std::optional<double> opinion;
    };
    Entry& entry(std::string_view text);

    Embedder const& embedder_;
    Driver& driver_;
    std::mutex mutex_;
    std::unordered_map<std::string, Entry> entries_;
};

/// Append an observation with the embedder's vector and the driver's importance.
MemoryRecord const& write_memory(MemoryStore& store, std::string_view observation, MemoryKind kind, Step now,
                                 Embedder const& embedder, Driver& driver);

/// Cached variant used by the engine.
MemoryRecord const& write_memory(MemoryStore& store, std::string_view observation, MemoryKind kind, Step now,
                                 ContentCache& cache, TweetId tweet = kNoTweet);

struct ActResult {
    Action action;
    double opinion = 0.0;         ///< the agent's opinion after acting
    bool coerced = false;         ///< driver output was unusable and became DoNothing
    std::size_t driver_calls = 0; ///< action-generation calls made
};

struct CoreAgentContext {
    Persona const& persona;
    double opinion;
    MemoryStore& memory;
};

/*!
 * One core-agent turn: retrieve memories for the environment prompt, ask the
 * driver for an action, validate it, move the opinion to the score of any
 * content produced, and record that content as a personal memory.
 */
ActResult act(CoreAgentContext agent, std::string_view environment, NeighborDigest const& digest,
              ContentCache& cache, Step now, MemoryParams const& params, std::uint64_t seed);

struct ReflectResult {
    std::size_t insights = 0;
    std::size_t driver_calls = 0;
};

/// Question generation, per-question retrieval, and insight writing into personal memory.
/// Driver errors skip the reflection.
ReflectResult reflect(MemoryStore& store, ContentCache& cache, Step now, MemoryParams const& params);

}  // namespace rumorsim
