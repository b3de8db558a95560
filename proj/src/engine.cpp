#include "rumorsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "rumorsim/checkpoint.hpp"
#include "rumorsim/config.hpp"
#include "rumorsim/error.hpp"
#include "rumorsim/rng.hpp"

namespace rumorsim {

std::string_view to_string(InterventionKind k) noexcept
{
    switch (k) {
    case InterventionKind::single: return "single";
    case InterventionKind::continuous: return "continuous";
    case InterventionKind::leader_continuous: return "leader_continuous";
    }
    return "single";
}

std::optional<InterventionKind> parse_intervention_kind(std::string_view s) noexcept
{
    if (s == "single") {
        return InterventionKind::single;
    }
    if (s == "continuous") {
        return InterventionKind::continuous;
    }
    if (s == "leader_continuous" || s == "leader") {
        return InterventionKind::leader_continuous;
    }
    return std::nullopt;
}

BeliefState belief_state(double o) noexcept
{
    if (o < -1.0 / 3.0) {
        return BeliefState::disbelief;
    }
    if (o > 1.0 / 3.0) {
        return BeliefState::certainty;
    }
    return BeliefState::uncertainty;
}

std::string_view to_string(BeliefState b) noexcept
{
    switch (b) {
    case BeliefState::disbelief: return "disbelief";
    case BeliefState::uncertainty: return "uncertainty";
    case BeliefState::certainty: return "certainty";
    }
    return "uncertainty";
}

std::array<std::uint64_t, kHistogramBins> opinion_histogram(std::span<double const> opinions)
{
    std::array<std::uint64_t, kHistogramBins> h{};
    for (double o : opinions) {
        auto const bin = static_cast<std::ptrdiff_t>(std::floor((clamp_opinion(o) + 1.0) / 0.1));
        ++h[static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(bin, 0, kHistogramBins - 1))];
    }
    return h;
}

std::array<std::uint64_t, 3> belief_counts(std::span<double const> opinions)
{
    std::array<std::uint64_t, 3> c{};
    for (double o : opinions) {
        ++c[static_cast<std::size_t>(belief_state(o))];
    }
    return c;
}

//---------------------------------------------------------------------------//

NetworkConfig NetworkSpec::hcn_config(std::uint64_t master_seed) const
{
    NetworkConfig c;
    c.total_nodes = nodes;
    c.edges_per_new_node = m;
    c.preferential_probability = p;
    c.seed_clique_size = seed_clique ? seed_clique : NetworkConfig::default_seed_clique(m);
    c.rng_seed = seed.value_or(master_seed);
    return c;
}

Graph build_network(NetworkSpec const& spec, std::uint64_t master_seed)
{
    auto const hcn = spec.hcn_config(master_seed);
    switch (spec.kind) {
    case NetworkKind::hcn:
        return build_hcn(hcn);
    case NetworkKind::random:
        return build_random(spec.nodes, spec.edges ? spec.edges : hcn_edge_count(hcn), hcn.rng_seed);
    case NetworkKind::regular: {
        std::size_t k = spec.k;
        if (k == 0) {
            double const mean_degree = 2.0 * static_cast<double>(hcn_edge_count(hcn)) / static_cast<double>(spec.nodes);
            k = 2 * static_cast<std::size_t>(std::llround(mean_degree / 2.0));
        }
        return build_regular(spec.nodes, k, hcn.rng_seed);
    }
    case NetworkKind::file:
        return load_graph(spec.path);
    }
    throw ConfigError("unknown network kind");
}

void SimulationConfig::validate() const
{
    auto const fail = [](std::string const& what) { throw ConfigError("config: " + what); };
    if (steps < 1) {
        fail("steps must be >= 1");
    }
    if (network.kind == NetworkKind::file) {
        if (!std::filesystem::exists(network.path)) {
            fail("network file not found: " + network.path);
        }
    } else {
        network.hcn_config(seed).validate();
    }
    deffuant.base.validate();
    if (auto const& r = deffuant.epsilon_range) {
        if (!((*r)[0] > 0.0 && (*r)[0] <= (*r)[1] && (*r)[1] <= 2.0)) {
            fail("deffuant.epsilon_range must satisfy 0 < low <= high <= 2");
        }
    }
    if (auto const& r = deffuant.alpha_range) {
        if (!((*r)[0] > 0.0 && (*r)[0] <= (*r)[1] && (*r)[1] <= 1.0)) {
            fail("deffuant.alpha_range must satisfy 0 < low <= high <= 1");
        }
    }
    grouping.validate();
    persona.validate();
    if (memory.retrieval_k < 1 || !(memory.decay > 0.0 && memory.decay <= 1.0)) {
        fail("memory.retrieval_k must be >= 1 and memory.decay in (0, 1]");
    }
    if (reflection_period < 1) {
        fail("reflection_period must be >= 1");
    }
    if (!(event_importance >= 1.0 && event_importance <= 10.0)) {
        fail("event_importance must lie in [1, 10]");
    }
    auto const in_range = [](double x) { return x >= -1.0 && x <= 1.0; };
    switch (initial.kind) {
    case InitialOpinionSpec::Kind::uniform:
        if (!(in_range(initial.low) && in_range(initial.high) && initial.low <= initial.high)) {
            fail("initial_opinions: need -1 <= low <= high <= 1");
        }
        break;
    case InitialOpinionSpec::Kind::two_point:
        if (!(in_range(initial.values[0]) && in_range(initial.values[1]) && initial.weight >= 0.0
              && initial.weight <= 1.0 && initial.jitter >= 0.0)) {
            fail("initial_opinions: two_point values in [-1, 1], weight in [0, 1], jitter >= 0");
        }
        break;
    case InitialOpinionSpec::Kind::file:
        if (!std::filesystem::exists(initial.path)) {
            fail("initial opinion file not found: " + initial.path);
        }
        break;
    }
    if (auto const& g = initial.seed_group) {
        if (!(g->fraction >= 0.0 && g->fraction <= 1.0 && in_range(g->low) && in_range(g->high) && g->low <= g->high)) {
            fail("initial_opinions.seed_group: fraction in [0, 1], -1 <= low <= high <= 1");
        }
        if (g->alpha && !(*g->alpha > 0.0 && *g->alpha <= 1.0)) {
            fail("initial_opinions.seed_group.alpha must lie in (0, 1]");
        }
    }
    for (auto const& e : events) {
        if (e.from >= e.until || !in_range(e.score) || e.text.empty()) {
            fail("events: need from < until, score in [-1, 1] and non-empty text");
        }
    }
    for (auto const& i : interventions) {
        if (i.start_step >= steps) {
            fail("interventions: start_step must be < steps");
        }
        if (!in_range(i.message_score) || i.message.empty()) {
            fail("interventions: message_score in [-1, 1] and non-empty message");
        }
    }
    if (checkpoint_every < 0) {
        fail("checkpoint_every must be >= 0");
    }
}

std::shared_ptr<Driver> make_driver(DriverSpec const& spec)
{
    if (spec.kind == DriverKind::http) {
        return std::make_shared<HttpDriver>(spec.http);
    }
    return std::make_shared<ScriptedDriver>(spec.scripted);
}

//---------------------------------------------------------------------------//

namespace {

/// Seed group members, in selection order.
std::vector<AgentId> seed_group(SeedGroupSpec const& group, Graph const& g, std::uint64_t master)
{
    std::size_t const n = g.node_count();
    auto const count = static_cast<std::size_t>(std::llround(group.fraction * static_cast<double>(n)));
    std::vector<AgentId> ids(n);
    std::iota(ids.begin(), ids.end(), AgentId{0});
    if (group.selector == SeedGroupSpec::Selector::top_degree) {
        std::stable_sort(ids.begin(), ids.end(), [&](AgentId a, AgentId b) { return g.degree(a) > g.degree(b); });
    } else {
        auto rng = derive_stream(master, StreamPurpose::seed_group);
        for (std::size_t k = 0; k < count; ++k) {
            std::swap(ids[k], ids[k + rng.below(n - k)]);
        }
    }
    ids.resize(count);
    return ids;
}

std::vector<double> initial_opinions(InitialOpinionSpec const& spec, Graph const& g, std::uint64_t master)
{
    std::size_t const n = g.node_count();
    std::vector<double> o(n);
    switch (spec.kind) {
    case InitialOpinionSpec::Kind::uniform:
        for (std::size_t i = 0; i < n; ++i) {
            o[i] = derive_stream(master, StreamPurpose::initial_opinion, i).uniform(spec.low, spec.high);
        }
        break;
    case InitialOpinionSpec::Kind::two_point:
        for (std::size_t i = 0; i < n; ++i) {
            auto rng = derive_stream(master, StreamPurpose::initial_opinion, i);
            double const base = rng.bernoulli(spec.weight) ? spec.values[0] : spec.values[1];
            o[i] = clamp_opinion(base + rng.uniform(-spec.jitter, spec.jitter));
        }
        break;
    case InitialOpinionSpec::Kind::file: {
        std::ifstream in(spec.path);
        if (!in) {
            throw ConfigError("cannot open initial opinion file " + spec.path);
        }
        std::size_t i = 0;
        double x = 0.0;
        while (in >> x) {
            if (i >= n || !(x >= -1.0 && x <= 1.0)) {
                throw ConfigError("initial opinion file: values must lie in [-1, 1], one per agent");
            }
            o[i++] = x;
        }
        if (i != n) {
            throw ConfigError("initial opinion file: expected " + std::to_string(n) + " values, got "
                              + std::to_string(i));
        }
        break;
    }
    }
    if (auto const& group = spec.seed_group) {
        for (AgentId id : seed_group(*group, g, master)) {
            o[id] = derive_stream(master, StreamPurpose::seed_group, id, 1).uniform(group->low, group->high);
        }
    }
    return o;
}

std::vector<DeffuantParams> agent_params(DeffuantSpec const& spec, std::size_t n, std::uint64_t master)
{
    std::vector<DeffuantParams> params(n, spec.base);
    if (!spec.epsilon_range && !spec.alpha_range) {
        return params;
    }
    for (std::size_t i = 0; i < n; ++i) {
        auto rng = derive_stream(master, StreamPurpose::deffuant_params, i);
        double const e = rng.uniform();
        double const a = rng.uniform();
        if (auto const& r = spec.epsilon_range) {
            params[i].confidence_bound = (*r)[0] + ((*r)[1] - (*r)[0]) * e;
        }
        if (auto const& r = spec.alpha_range) {
            params[i].convergence_rate = (*r)[0] + ((*r)[1] - (*r)[0]) * a;
        }
    }
    return params;
}

/// Runs body(k) for k in [0, count) and rethrows the first failure by index.
template <class Body>
void parallel_for_each(std::size_t count, std::size_t threads, Body&& body)
{
    std::vector<std::exception_ptr> errors(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(static_cast<int>(std::max<std::size_t>(threads, 1)))
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(count); ++k) {
        try {
            body(static_cast<std::size_t>(k));
        } catch (...) {
            errors[static_cast<std::size_t>(k)] = std::current_exception();
        }
    }
    for (auto const& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

}  // namespace

Simulation::Simulation(SimulationConfig config, std::shared_ptr<Driver> driver, std::shared_ptr<Embedder> embedder)
    : Simulation(config, build_network(config.network, config.seed), std::move(driver), std::move(embedder))
{
}

Simulation::Simulation(SimulationConfig config, Graph graph, std::shared_ptr<Driver> driver,
                       std::shared_ptr<Embedder> embedder)
    : config_(std::move(config)),
      driver_(driver ? std::move(driver) : make_driver(config_.driver)),
      embedder_(embedder ? std::move(embedder) : std::make_shared<HashingEmbedder>())
{
    config_.validate();
    state_.master_seed = config_.seed;
    state_.graph = std::move(graph);
    init_agents();
    cache_ = std::make_unique<ContentCache>(*embedder_, *driver_);
    for (auto const& spec : config_.interventions) {
        resolve_leader(spec);
    }
}

Simulation::Simulation(SimulationConfig config, SimulationState state, std::shared_ptr<Driver> driver,
                       std::shared_ptr<Embedder> embedder)
    : config_(std::move(config)),
      state_(std::move(state)),
      driver_(driver ? std::move(driver) : make_driver(config_.driver)),
      embedder_(embedder ? std::move(embedder) : std::make_shared<HashingEmbedder>())
{
    std::size_t const n = state_.graph.node_count();
    if (state_.opinions.size() != n || state_.params.size() != n || state_.memories.size() != n
        || state_.pending_texts.size() != n) {
        throw CheckpointError("checkpoint: state sizes disagree with the graph");
    }
    cache_ = std::make_unique<ContentCache>(*embedder_, *driver_);
    for (auto const& t : state_.tweets) {
        cache_->insert(t.content);
    }
    for (auto const& spec : config_.interventions) {
        resolve_leader(spec);
    }
}

void Simulation::init_agents()
{
    std::size_t const n = state_.graph.node_count();
    if (n == 0) {
        throw ConfigError("config: the network has no nodes");
    }
    state_.opinions = initial_opinions(config_.initial, state_.graph, state_.master_seed);
    state_.params = agent_params(config_.deffuant, n, state_.master_seed);
    if (auto const& group = config_.initial.seed_group; group && group->alpha) {
        for (AgentId id : seed_group(*group, state_.graph, state_.master_seed)) {
            state_.params[id].convergence_rate = *group->alpha;
        }
    }
    state_.memories.assign(n, MemoryStore{});
    state_.pending_texts.assign(n, {});
}

Simulation Simulation::resume(Checkpoint const& checkpoint, std::optional<SimulationConfig> config,
                              std::shared_ptr<Driver> driver, std::shared_ptr<Embedder> embedder)
{
    SimulationConfig stored;
    try {
        stored = config_from_json(nlohmann::json::parse(checkpoint.config_json));
    } catch (nlohmann::json::exception const& e) {
        throw CheckpointError(std::string("checkpoint: unreadable config: ") + e.what());
    }
    if (config_hash(stored) != checkpoint.config_hash) {
        throw CheckpointError("checkpoint: config hash mismatch (stored config does not match its hash)");
    }
    if (config) {
        if (config_hash(*config) != checkpoint.config_hash) {
            throw CheckpointError("checkpoint: config hash mismatch");
        }
        stored = std::move(*config);
    }
    if (checkpoint.state.step > stored.steps) {
        throw CheckpointError("checkpoint: step " + std::to_string(checkpoint.state.step) + " is past the horizon");
    }
    return Simulation(std::move(stored), checkpoint.state, std::move(driver), std::move(embedder));
}

void Simulation::set_opinions(std::span<double const> opinions)
{
    if (opinions.size() != state_.opinions.size()) {
        throw InterfaceError("set_opinions: size mismatch");
    }
    for (double o : opinions) {
        if (!(o >= -1.0 && o <= 1.0)) {
            throw DomainError("set_opinions: opinion outside [-1, 1]");
        }
    }
    state_.opinions.assign(opinions.begin(), opinions.end());
}

void Simulation::set_interventions(std::vector<InterventionSpec> interventions)
{
    auto next = config_;
    next.interventions = std::move(interventions);
    next.validate();
    for (auto const& spec : next.interventions) {
        resolve_leader(spec);
    }
    config_ = std::move(next);
}

void Simulation::set_steps(Step steps)
{
    auto next = config_;
    next.steps = steps;
    next.validate();
    config_ = std::move(next);
}

AgentId Simulation::resolve_leader(InterventionSpec const& spec) const
{
    auto const& g = state_.graph;
    if (spec.leader_id) {
        if (*spec.leader_id >= g.node_count()) {
            throw ConfigError("intervention: leader id " + std::to_string(*spec.leader_id) + " is not an agent");
        }
        return *spec.leader_id;
    }
    AgentId best = 0;
    for (AgentId i = 1; i < g.node_count(); ++i) {
        if (g.degree(i) > g.degree(best)) {
            best = i;
        }
    }
    return best;
}

Checkpoint Simulation::checkpoint() const
{
    Checkpoint c;
    c.config_hash = config_hash(config_);
    c.config_json = config_to_json(config_).dump();
    c.state = state_;
    return c;
}

Persona const& Simulation::persona_for(AgentId id)
{
    auto it = state_.personas.find(id);
    if (it == state_.personas.end()) {
        auto const seed = derive_stream(state_.master_seed, StreamPurpose::persona, id).key();
        it = state_.personas.emplace(id, make_persona(seed, config_.persona, *driver_)).first;
    }
    return it->second;
}

TweetId Simulation::add_tweet(AgentId author, ContentPtr content, double score)
{
    TweetId const id = state_.next_tweet++;
    state_.tweets.push_back(Tweet{id, author, std::move(content), score, state_.step});
    return id;
}

std::string Simulation::environment_prompt(std::vector<EventSpec const*> const& events) const
{
    std::string prompt = config_.topic;
    for (auto const* e : events) {
        prompt += '\n';
        prompt += e->text;
    }
    for (auto const& b : state_.pending_broadcasts) {
        prompt += '\n';
        prompt += b.text;
    }
    return prompt;
}

StepRecord Simulation::step()
{
    if (finished()) {
        throw InterfaceError("step: the run is already complete");
    }
    Step const t = state_.step;
    auto const& g = state_.graph;
    std::size_t const n = g.node_count();
    std::vector<double> const snapshot = state_.opinions;

    StepRecord record;
    record.step = t;

    // (1) Scheduled events.
    std::vector<EventSpec const*> events;
    std::vector<Message> event_messages;
    std::vector<TweetId> event_tweets;
    for (auto const& e : config_.events) {
        if (e.active_at(t)) {
            events.push_back(&e);
            event_tweets.push_back(add_tweet(kGlobalSender, cache_->content(e.text), e.score));
            if (e.audience == Audience::all) {
                event_messages.push_back(Message{kGlobalSender, e.score});
            }
        }
    }
    for (auto const& b : state_.pending_broadcasts) {
        event_messages.push_back(Message{kGlobalSender, b.score});
    }
    record.events = events.size();
    auto const prompt = environment_prompt(events);

    // (2) Partition on the frozen snapshot, plus pinned leaders.
    AgentPartition partition;
    if (config_.strategy == GroupingStrategy::all_core) {
        std::vector<AgentId> all;
        for (AgentId i = 0; i < n; ++i) {
            if (g.degree(i) > 0) {
                all.push_back(i);
            }
        }
        partition = partition_from_core(n, std::move(all));
    } else {
        partition = partition_agents(snapshot, g, config_.grouping);
    }
    std::map<AgentId, InterventionSpec const*> leaders;
    for (auto const& spec : config_.interventions) {
        if (spec.pins_leader_at(t)) {
            leaders.try_emplace(resolve_leader(spec), &spec);
        }
    }
    if (!leaders.empty()) {
        auto core = partition.core_ids;
        for (auto const& [id, spec] : leaders) {
            core.push_back(id);
        }
        partition = partition_from_core(n, std::move(core), std::move(partition.tau));
    }
    auto const& core = partition.core_ids;

    auto const write_event = [&](AgentId id, std::string const& text, TweetId tweet) {
        MemoryRecord r;
        r.content = cache_->content(text);
        r.importance = config_.event_importance;
        r.timestamp = t;
        r.kind = MemoryKind::environmental;
        r.tweet = tweet;
        state_.memories[id].add(std::move(r));
    };
    for (AgentId id : core) {
        for (std::size_t k = 0; k < events.size(); ++k) {
            write_event(id, events[k]->text, event_tweets[k]);
        }
    }

    // (3) Core agents act.
    for (AgentId id : core) {
        persona_for(id);
    }
    std::vector<ActResult> results(core.size());
    try {
        parallel_for_each(core.size(), config_.driver.parallelism, [&](std::size_t k) {
            AgentId const id = core[k];
            auto& memory = state_.memories[id];
            if (auto const it = leaders.find(id); it != leaders.end()) {
                auto const* spec = it->second;
                write_memory(memory, spec->message, MemoryKind::personal, t, *cache_);
                results[k].action.kind = ActionKind::post;
                results[k].action.content = spec->message;
                results[k].action.opinion_score = spec->message_score;
                results[k].opinion = spec->message_score;
                results[k].driver_calls = 1;
                return;
            }
            std::vector<Message> numeric;
            for (AgentId j : g.neighbors(id)) {
                if (!partition.is_core[j]) {
                    numeric.push_back(Message{j, message_of(snapshot[j])});
                }
            }
            auto const digest = digest_for_core(id, state_.pending_texts[id], numeric);
            auto const seed = derive_stream(state_.master_seed, StreamPurpose::action, id, static_cast<std::uint64_t>(t)).key();
            results[k] = act(CoreAgentContext{state_.personas.at(id), snapshot[id], memory}, prompt, digest, *cache_, t,
                             config_.memory, seed);
        });
        if ((t + 1) % config_.reflection_period == 0) {
            std::vector<std::size_t> calls(core.size(), 0);
            parallel_for_each(core.size(), config_.driver.parallelism, [&](std::size_t k) {
                calls[k] = reflect(state_.memories[core[k]], *cache_, t, config_.memory).driver_calls;
            });
            for (auto c : calls) {
                record.driver_calls += c;
            }
        }
    } catch (DriverUnavailable const& e) {
        throw RunAbort(std::string("driver unavailable at step ") + std::to_string(t) + ": " + e.what());
    }

    std::vector<std::optional<Emission>> emissions(n);
    std::vector<double> next(n);
    for (std::size_t k = 0; k < core.size(); ++k) {
        AgentId const id = core[k];
        auto const& r = results[k];
        record.driver_calls += r.driver_calls;
        next[id] = r.opinion;
        if (r.action.has_content()) {
            auto content = cache_->content(r.action.content);
            auto const score = *r.action.opinion_score;
            TweetId const tweet = add_tweet(id, content, score);
            emissions[id] = Emission{tweet, std::move(content), score};
        } else if (r.action.kind == ActionKind::like && r.action.target) {
            auto const target = *r.action.target;
            if (target >= 1 && target < state_.next_tweet) {
                auto const& liked = state_.tweets[target - 1];
                if (liked.author != kGlobalSender && liked.author != id && partition.is_core[liked.author]) {
                    write_memory(state_.memories[liked.author], "A neighbor liked my post: " + liked.content->text,
                                 MemoryKind::environmental, t, *cache_, liked.id);
                }
            }
        }
    }

    // (4) Routing; texts land in environmental memory and feed next step's digests.
    RoutedMessages routed;
    try {
        routed = route_messages(partition, g, emissions, snapshot, *driver_, t);
        std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic, 1024)
        for (std::int64_t ii = 0; ii < static_cast<std::int64_t>(n); ++ii) {
            auto const i = static_cast<std::size_t>(ii);
            try {
                for (auto const& m : routed.texts[i]) {
                    write_memory(state_.memories[i], m.content->text, MemoryKind::environmental, t, *cache_, m.tweet);
                }
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
        for (auto const& e : errors) {
            if (e) {
                std::rethrow_exception(e);
            }
        }
    } catch (DriverUnavailable const& e) {
        throw RunAbort(std::string("driver unavailable at step ") + std::to_string(t) + ": " + e.what());
    }
    state_.pending_texts = std::move(routed.texts);

    // (5) Deffuant step for regular agents.
    std::vector<std::uint8_t> regular(n);
    for (std::size_t i = 0; i < n; ++i) {
        regular[i] = !partition.is_core[i];
    }
    std::vector<double> updated(n);
    step_regular(snapshot, state_.params, routed.numeric, regular, updated, event_messages);
    for (AgentId id : core) {
        updated[id] = next[id];
    }

    // (6) Interventions: core agents remember the debunk now, everyone
    // receives it with the next step's messages.
    std::vector<Broadcast> broadcasts;
    for (auto const& spec : config_.interventions) {
        if (!spec.broadcasts_at(t)) {
            continue;
        }
        record.interventions.push_back(std::string(to_string(spec.kind)) + "@" + std::to_string(spec.start_step));
        TweetId const tweet = add_tweet(kGlobalSender, cache_->content(spec.message), spec.message_score);
        for (AgentId id : core) {
            write_event(id, spec.message, tweet);
        }
        broadcasts.push_back(Broadcast{spec.message, spec.message_score});
    }
    state_.pending_broadcasts = std::move(broadcasts);

    // (7) Commit and log.
    state_.opinions = std::move(updated);
    state_.last_core = core;
    state_.driver_calls += record.driver_calls;
    state_.step = t + 1;

    double sum = 0.0;
    for (double o : state_.opinions) {
        sum += o;
    }
    record.mean_opinion = sum / static_cast<double>(n);
    record.histogram = opinion_histogram(state_.opinions);
    record.beliefs = belief_counts(state_.opinions);
    record.core_ids = core;
    return record;
}

TrajectoryLog Simulation::run(RunOptions const& options)
{
    TrajectoryLog log;
    while (!finished()) {
        log.steps.push_back(step());
        if (options.on_step) {
            options.on_step(log.steps.back());
        }
        if (config_.checkpoint_every > 0 && !options.checkpoint_dir.empty()
            && state_.step % config_.checkpoint_every == 0) {
            std::filesystem::create_directories(options.checkpoint_dir);
            save_checkpoint(checkpoint(), std::filesystem::path(options.checkpoint_dir)
                                              / ("checkpoint-" + std::to_string(state_.step) + ".bin"));
        }
    }
    log.final_opinions = state_.opinions;
    return log;
}

TrajectoryLog run(SimulationConfig const& config, RunOptions const& options)
{
    Simulation sim(config);
    return sim.run(options);
}

}  // namespace rumorsim
