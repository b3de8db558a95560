#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rumorsim/bridge.hpp"
#include "rumorsim/core_agent.hpp"
#include "rumorsim/driver.hpp"
#include "rumorsim/grouping.hpp"
#include "rumorsim/http_driver.hpp"
#include "rumorsim/memory.hpp"
#include "rumorsim/network.hpp"
#include "rumorsim/opinion.hpp"
#include "rumorsim/persona.hpp"

namespace rumorsim {

//---------------------------------------------------------------------------//
// Configuration
//---------------------------------------------------------------------------//

enum class NetworkKind : std::uint8_t { hcn, random, regular, file };

struct NetworkSpec {
    NetworkKind kind = NetworkKind::hcn;
    std::size_t nodes = 1000;
    std::size_t m = 4;
    double p = 0.8;
    std::size_t seed_clique = 0;  ///< 0: max(m + 1, 5)
    std::size_t edges = 0;        ///< random: 0 means the HCN edge count for (nodes, m)
    std::size_t k = 0;            ///< regular: 0 means the even degree closest to the HCN mean degree
    std::string path;             ///< file
    std::optional<std::uint64_t> seed;  ///< defaults to the master seed

    NetworkConfig hcn_config(std::uint64_t master_seed) const;
};

Graph build_network(NetworkSpec const& spec, std::uint64_t master_seed);

struct SeedGroupSpec {
    enum class Selector : std::uint8_t { random, top_degree };
    double fraction = 0.0;
    double low = 0.6;
    double high = 0.9;
    Selector selector = Selector::random;
    std::optional<double> alpha;  ///< convergence rate of the group; small values make stubborn sources
};

struct InitialOpinionSpec {
    enum class Kind : std::uint8_t { uniform, two_point, file };
    Kind kind = Kind::uniform;
    double low = -0.8;
    double high = -0.2;
    std::array<double, 2> values{-0.6, 0.6};
    double weight = 0.5;   ///< probability of values[0]
    double jitter = 0.0;   ///< uniform noise half-width around each value
    std::string path;      ///< one opinion per line
    std::optional<SeedGroupSpec> seed_group;
};

struct DeffuantSpec {
    DeffuantParams base;
    std::optional<std::array<double, 2>> epsilon_range;
    std::optional<std::array<double, 2>> alpha_range;
};

enum class Audience : std::uint8_t { all, core };

/// A tweet injected into the environment at every step in [from, until).
struct EventSpec {
    Step from = 0;
    Step until = 1;
    std::string text;
    double score = 0.0;
    Audience audience = Audience::all;

    bool active_at(Step t) const noexcept { return t >= from && t < until; }
};

enum class InterventionKind : std::uint8_t { single, continuous, leader_continuous };

std::string_view to_string(InterventionKind k) noexcept;
std::optional<InterventionKind> parse_intervention_kind(std::string_view s) noexcept;

struct InterventionSpec {
    InterventionKind kind = InterventionKind::single;
    Step start_step = 0;
    std::string message = "Official fact-check: this story is definitely false.";
    double message_score = -0.8;
    std::optional<AgentId> leader_id;  ///< leader kind only; empty selects the top-degree node

    /// Broadcast happens at this step.
    bool broadcasts_at(Step t) const noexcept
    {
        return kind == InterventionKind::single ? t == start_step : t >= start_step;
    }
    bool pins_leader_at(Step t) const noexcept
    {
        return kind == InterventionKind::leader_continuous && t >= start_step;
    }
};

enum class GroupingStrategy : std::uint8_t { adaptive, all_core };

enum class DriverKind : std::uint8_t { scripted, http };

struct DriverSpec {
    DriverKind kind = DriverKind::scripted;
    std::size_t parallelism = 1;
    ScriptedDriverParams scripted;
    HttpDriverConfig http;
};

struct SimulationConfig {
    NetworkSpec network;
    Step steps = 20;
    std::uint64_t seed = 42;
    DeffuantSpec deffuant;
    ConfusionParams grouping;
    GroupingStrategy strategy = GroupingStrategy::adaptive;
    PersonaConfig persona = PersonaConfig::defaults();
    DriverSpec driver;
    MemoryParams memory;
    Step reflection_period = 5;
    double event_importance = 8.0;
    std::string topic = "A rumor is circulating online. Is this story true?";
    InitialOpinionSpec initial;
    std::vector<EventSpec> events;
    std::vector<InterventionSpec> interventions;
    Step checkpoint_every = 0;  ///< 0 disables periodic checkpoints

    void validate() const;
};

//---------------------------------------------------------------------------//
// State and logs
//---------------------------------------------------------------------------//

enum class BeliefState : std::uint8_t { disbelief = 0, uncertainty = 1, certainty = 2 };

/// Tercile split at +-1/3.
BeliefState belief_state(double opinion) noexcept;
std::string_view to_string(BeliefState b) noexcept;

struct Tweet {
    TweetId id = kNoTweet;
    AgentId author = kGlobalSender;
    ContentPtr content;
    double score = 0.0;
    Step step = 0;
};

/// A debunk issued at one step, delivered with the next step's messages.
struct Broadcast {
    std::string text;
    double score = 0.0;

    friend bool operator==(Broadcast const&, Broadcast const&) = default;
};

/// Everything that changes during a run. Checkpoints store exactly this.
struct SimulationState {
    Step step = 0;  ///< completed steps
    std::uint64_t master_seed = 0;
    Graph graph;
    std::vector<double> opinions;
    std::vector<DeffuantParams> params;
    std::vector<AgentId> last_core;  ///< partition of the last completed step
    std::map<AgentId, Persona> personas;
    std::vector<MemoryStore> memories;
    std::vector<Tweet> tweets;
    std::vector<std::vector<CoreMessage>> pending_texts;  ///< texts routed last step
    std::vector<Broadcast> pending_broadcasts;            ///< interventions issued last step
    TweetId next_tweet = 1;
    std::uint64_t driver_calls = 0;
};

inline constexpr std::size_t kHistogramBins = 20;

struct StepRecord {
    Step step = 0;  ///< executed step index; the state logged is time step + 1
    double mean_opinion = 0.0;
    std::array<std::uint64_t, kHistogramBins> histogram{};
    std::vector<AgentId> core_ids;
    std::array<std::uint64_t, 3> beliefs{};
    std::uint64_t driver_calls = 0;
    std::vector<std::string> interventions;
    std::size_t events = 0;

    friend bool operator==(StepRecord const&, StepRecord const&) = default;
};

struct TrajectoryLog {
    std::vector<StepRecord> steps;
    std::vector<double> final_opinions;
};

std::array<std::uint64_t, kHistogramBins> opinion_histogram(std::span<double const> opinions);
std::array<std::uint64_t, 3> belief_counts(std::span<double const> opinions);

struct Checkpoint;

//---------------------------------------------------------------------------//
// Simulation
//---------------------------------------------------------------------------//

/// Construct the driver a configuration asks for.
std::shared_ptr<Driver> make_driver(DriverSpec const& spec);

struct RunOptions {
    std::function<void(StepRecord const&)> on_step;
    /// Directory for periodic checkpoints (config.checkpoint_every); empty disables.
    std::string checkpoint_dir;
};

/*!
 * The per-step loop: events, adaptive grouping, core actions, routing,
 * Deffuant updates for regular agents, interventions, logging.
 */
class Simulation {
  public:
    explicit Simulation(SimulationConfig config, std::shared_ptr<Driver> driver = nullptr,
                        std::shared_ptr<Embedder> embedder = nullptr);

    /// Use a prebuilt graph instead of the configured network.
    Simulation(SimulationConfig config, Graph graph, std::shared_ptr<Driver> driver = nullptr,
               std::shared_ptr<Embedder> embedder = nullptr);

    /// Resume from a checkpoint. The configuration defaults to the one stored in
    /// the checkpoint; an override must hash-match it (interventions, steps and
    /// cadence may differ).
    static Simulation resume(Checkpoint const& checkpoint, std::optional<SimulationConfig> config = std::nullopt,
                             std::shared_ptr<Driver> driver = nullptr, std::shared_ptr<Embedder> embedder = nullptr);

    StepRecord step();
    TrajectoryLog run(RunOptions const& options = {});

    bool finished() const noexcept { return state_.step >= config_.steps; }
    Step current_step() const noexcept { return state_.step; }

    SimulationConfig const& config() const noexcept { return config_; }
    SimulationState const& state() const noexcept { return state_; }
    Graph const& graph() const noexcept { return state_.graph; }
    std::span<double const> opinions() const noexcept { return state_.opinions; }

    /// Replace opinions (tests and custom initial conditions).
    void set_opinions(std::span<double const> opinions);

    /// Intervention and horizon changes keep the config hash intact.
    void set_interventions(std::vector<InterventionSpec> interventions);
    void set_steps(Step steps);

    /// The agent a leader intervention pins.
    AgentId resolve_leader(InterventionSpec const& spec) const;

    Checkpoint checkpoint() const;

  private:
    Simulation(SimulationConfig config, SimulationState state, std::shared_ptr<Driver> driver,
               std::shared_ptr<Embedder> embedder);

    void init_agents();
    std::string environment_prompt(std::vector<EventSpec const*> const& events) const;
    Persona const& persona_for(AgentId id);
    TweetId add_tweet(AgentId author, ContentPtr content, double score);

    SimulationConfig config_;
    SimulationState state_;
    std::shared_ptr<Driver> driver_;
    std::shared_ptr<Embedder> embedder_;
    std::unique_ptr<ContentCache> cache_;
};

/// Run a configuration from scratch.
TrajectoryLog run(SimulationConfig const& config, RunOptions const& options = {});

}  // namespace rumorsim
