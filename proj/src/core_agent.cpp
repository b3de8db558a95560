#include "rumorsim/core_agent.hpp"

#include <algorithm>
#include <iostream>

#include "rumorsim/opinion.hpp"

namespace rumorsim {

ContentCache::Entry& ContentCache::entry(std::string_view text)
{
    // Caller holds the mutex.
    auto it = entries_.find(std::string(text));
    if (it == entries_.end()) {
        it = entries_.emplace(std::string(text), Entry{make_content(std::string(text), embedder_), {}, {}}).first;
    }
    return it->second;
}

ContentPtr ContentCache::content(std::string_view text)
{
    std::lock_guard lock(mutex_);
    return entry(text).content;
}

double ContentCache::importance(std::string_view text)
{
    {
        std::lock_guard lock(mutex_);
        if (auto const& v = entry(text).importance) {
            return *v;
        }
    }
    double const value = std::clamp(driver_.score_importance(text), 1.0, 10.0);
    std::lock_guard lock(mutex_);
    entry(text).importance = value;
    return value;
}

double ContentCache::opinion(std::string_view text)
{
    {
        std::lock_guard lock(mutex_);
        if (auto const& v = entry(text).opinion) {
            return *v;
        }
    }
    double const value = clamp_opinion(driver_.score_opinion(text));
    std::lock_guard lock(mutex_);
    entry(text).opinion = value;
    return value;
}

void ContentCache::insert(ContentPtr content)
{
    std::lock_guard lock(mutex_);
    auto key = content->text;
    entries_.try_emplace(std::move(key), Entry{std::move(content), {}, {}});
}

MemoryRecord const& write_memory(MemoryStore& store, std::string_view observation, MemoryKind kind, Step now,
                                 Embedder const& embedder, Driver& driver)
{
    MemoryRecord r;
    r.content = make_content(std::string(observation), embedder);
    r.importance = std::clamp(driver.score_importance(observation), 1.0, 10.0);
    r.timestamp = now;
    r.kind = kind;
    return store.add(std::move(r));
}

MemoryRecord const& write_memory(MemoryStore& store, std::string_view observation, MemoryKind kind, Step now,
                                 ContentCache& cache, TweetId tweet)
{
    MemoryRecord r;
    r.content = cache.content(observation);
    r.importance = cache.importance(observation);
    r.timestamp = now;
    r.kind = kind;
    r.tweet = tweet;
    return store.add(std::move(r));
}

ActResult act(CoreAgentContext agent, std::string_view environment, NeighborDigest const& digest,
              ContentCache& cache, Step now, MemoryParams const& params, std::uint64_t seed)
{
    ActResult result;
    result.opinion = agent.opinion;

    auto const query = cache.content(environment);
    auto const memories = retrieve_top_k(agent.memory, std::span<float const>(query->embedding), params.retrieval_k,
                                         now, params.decay);
    ActionRequest const request{agent.persona, agent.opinion, memories, environment, digest, now, seed};

    Action action;
    result.driver_calls = 1;
    try {
        action = cache.driver().generate_action(request);
    } catch (DriverUnavailable const&) {
        throw;
    } catch (DriverError const& e) {
        std::clog << "warning: driver failed for " << agent.persona.name << ": " << e.what() << '\n';
        result.coerced = true;
        return result;
    }
    if (!is_valid(action)) {
        std::clog << "warning: malformed " << to_string(action.kind) << " action coerced to do_nothing\n";
        result.action = Action::nothing();
        result.coerced = true;
        return result;
    }
    if (action.has_content()) {
        try {
            double const score = action.opinion_score ? clamp_opinion(*action.opinion_score)
                                                      : cache.opinion(action.content);
            write_memory(agent.memory, action.content, MemoryKind::personal, now, cache);
            action.opinion_score = score;
            result.opinion = score;
        } catch (DriverUnavailable const&) {
            throw;
        } catch (DriverError const& e) {
            std::clog << "warning: scoring failed, action dropped: " << e.what() << '\n';
            result.coerced = true;
            return result;
        }
    }
    result.action = std::move(action);
    return result;
}

ReflectResult reflect(MemoryStore& store, ContentCache& cache, Step now, MemoryParams const& params)
{
    ReflectResult result;
    if (store.empty()) {
        return result;
    }
    auto const recent = store.recent(params.reflection_recent);
    try {
        result.driver_calls = 1;
        auto const questions = cache.driver().generate_questions(recent);
        if (questions.empty()) {
            return result;
        }
        // Evidence: the recent records plus what each question retrieves.
        std::vector<MemoryRecord> evidence = recent;
        for (auto const& q : questions) {
            auto const qe = cache.content(q);
            for (auto& r : retrieve_top_k(store, std::span<float const>(qe->embedding), params.retrieval_k, now,
                                          params.decay)) {
                bool const seen = std::any_of(evidence.begin(), evidence.end(),
                                              [&](MemoryRecord const& e) { return e.sequence == r.sequence; });
                if (!seen) {
                    evidence.push_back(std::move(r));
                }
            }
        }
        result.driver_calls = 2;
        auto const insights = cache.driver().reflect(questions, evidence);
        for (auto const& text : insights) {
            if (!text.empty()) {
                write_memory(store, text, MemoryKind::personal, now, cache);
                ++result.insights;
            }
        }
    } catch (DriverUnavailable const&) {
        throw;
    } catch (DriverError const& e) {
        std::clog << "warning: reflection skipped: " << e.what() << '\n';
    }
    return result;
}

}  // namespace rumorsim
