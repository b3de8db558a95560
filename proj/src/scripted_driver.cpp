#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <string>

#include "rumorsim/driver.hpp"
#include "rumorsim/opinion.hpp"
#include "rumorsim/rng.hpp"

namespace rumorsim {

namespace {

struct StancePhrase {
    std::string_view phrase;
    double score;
};

constexpr std::array<StancePhrase, 7> kLexicon{{
    {"definitely true", 5.0 / 6.0},
    {"probably true", 0.5},
    {"might be true", 1.0 / 6.0},
    {"might be false", -1.0 / 6.0},
    {"probably false", -0.5},
    {"definitely false", -5.0 / 6.0},
    {"undecided", 0.0},
}};

// Index: sign (0 negative, 1 positive) * 3 + magnitude tercile.
constexpr std::array<std::string_view, 6> kClaims{
    "might be false", "is probably false", "is definitely false",
    "might be true",  "is probably true",  "is definitely true",
};

constexpr std::array<std::string_view, 3> kFrames{
    "I think this story {}.",
    "After reading the posts, the claim {}.",
    "My take: what people are sharing {}.",
};

constexpr std::string_view kQuestion = "What do the recent posts I have seen say about this story?";

std::string lower(std::string_view text)
{
    std::string s(text);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

MemoryRecord const* latest_environmental(std::span<MemoryRecord const> memories)
{
    MemoryRecord const* best = nullptr;
    for (auto const& m : memories) {
        if (m.kind != MemoryKind::environmental || m.tweet == kNoTweet) {
            continue;
        }
        if (!best || m.timestamp > best->timestamp
            || (m.timestamp == best->timestamp && m.sequence > best->sequence)) {
            best = &m;
        }
    }
    return best;
}

}  // namespace

double ScriptedDriver::lexicon_score(std::string_view text)
{
    std::string const s = lower(text);
    double sum = 0.0;
    std::size_t hits = 0;
    for (auto const& entry : kLexicon) {
        for (auto pos = s.find(entry.phrase); pos != std::string::npos; pos = s.find(entry.phrase, pos + 1)) {
            sum += entry.score;
            ++hits;
        }
    }
    return hits == 0 ? 0.0 : clamp_opinion(sum / static_cast<double>(hits));
}

std::string ScriptedDriver::render(double opinion, std::uint64_t variant)
{
    double const mag = std::abs(opinion);
    std::size_t const tercile = mag < 1.0 / 3.0 ? 0 : mag < 2.0 / 3.0 ? 1 : 2;
    std::size_t const idx = (opinion >= 0.0 ? 3 : 0) + tercile;
    std::string text(kFrames[variant % kFrames.size()]);
    text.replace(text.find("{}"), 2, kClaims[idx]);
    return text;
}

double ScriptedDriver::score_opinion(std::string_view text)
{
    return lexicon_score(text);
}

double ScriptedDriver::score_importance(std::string_view text)
{
    if (text.empty()) {
        return 1.0;
    }
    return std::clamp(1.0 + 8.0 * std::abs(lexicon_score(text)), 1.0, 10.0);
}

Action ScriptedDriver::generate_action(ActionRequest const& request)
{
    auto const& traits = request.persona.traits;
    double const o = request.opinion;
    double const window = std::min(2.0, params_.base_window * (1.0 + traits.openness));
    double const rate = params_.base_rate * (1.0 - 0.5 * traits.conscientiousness);

    double weight = 0.0;
    double weighted = 0.0;
    for (auto const& m : request.memories) {
        double const s = lexicon_score(m.text());
        if (std::abs(s - o) < window) {
            weight += m.importance;
            weighted += m.importance * s;
        }
    }
    if (!request.digest.empty() && std::abs(request.digest.mean_score - o) < window) {
        double const w = 2.0 + 6.0 * traits.agreeableness;
        weight += w;
        weighted += w * request.digest.mean_score;
    }
    if (weight == 0.0) {
        return Action::nothing();
    }

    double const delta = rate * (weighted / weight - o);
    double const next = clamp_opinion(o + delta);
    double const scale = 1.5 - traits.extraversion;
    CounterRng rng{request.seed};
    MemoryRecord const* latest = latest_environmental(request.memories);

    Action a;
    double const size = std::abs(delta);
    if (size >= 0.15 * scale || (size >= 0.05 * scale && !latest)) {
        a.kind = ActionKind::post;
        a.content = render(next, rng());
    } else if (size >= 0.05 * scale) {
        double const seen = lexicon_score(latest->text());
        a.target = latest->tweet;
        if ((seen > 0.0 && next > 0.0) || (seen < 0.0 && next < 0.0)) {
            a.kind = ActionKind::retweet;
            a.content = latest->text();
        } else {
            a.kind = ActionKind::reply;
            a.content = render(next, rng());
        }
    } else if (size >= 0.01 * scale && latest) {
        a.kind = ActionKind::like;
        a.target = latest->tweet;
    } else {
        return Action::nothing();
    }
    if (a.has_content()) {
        a.opinion_score = lexicon_score(a.content);
    }
    return a;
}

std::vector<std::string> ScriptedDriver::generate_questions(std::span<MemoryRecord const> recent)
{
    if (recent.empty()) {
        return {};
    }
    return {std::string(kQuestion)};
}

std::vector<std::string> ScriptedDriver::reflect(std::span<std::string const> questions,
                                                 std::span<MemoryRecord const> memories)
{
    if (questions.empty() || memories.empty()) {
        return {};
    }
    std::size_t positive = 0;
    std::size_t negative = 0;
    for (auto const& m : memories) {
        double const s = lexicon_score(m.text());
        positive += s > 0.0;
        negative += s < 0.0;
    }
    std::string insight = positive > negative   ? "Looking back, most of what I saw says this story is probably true."
                          : negative > positive ? "Looking back, most of what I saw says this story is probably false."
                                                : "Looking back, I remain undecided about this story.";
    return std::vector<std::string>(questions.size(), insight);
}

std::vector<std::string> ScriptedDriver::infer_interests(Persona const& persona, std::uint64_t seed)
{
    static std::array<std::vector<std::string_view>, 5> const pools{{
        {"art", "science", "travel", "philosophy", "photography", "literature"},
        {"personal finance", "productivity", "fitness", "career growth", "cooking"},
        {"sports", "music festivals", "celebrity news", "nightlife", "gaming"},
        {"volunteering", "family", "pets", "community events", "gardening"},
        {"politics", "health news", "current affairs", "true crime", "online forums"},
    }};
    auto const traits = persona.traits.as_array();
    std::array<std::size_t, 5> order{0, 1, 2, 3, 4};
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return traits[a] > traits[b]; });

    CounterRng rng{mix64(seed)};
    std::size_t const count = 3 + rng.below(3);
    std::vector<std::string> out;
    for (std::size_t rank = 0; out.size() < count; ++rank) {
        auto pool = pools[order[rank % order.size()]];
        // Take up to two tags from each pool, strongest trait first.
        for (int take = 0; take < 2 && out.size() < count; ++take) {
            auto const& tag = pool[rng.below(pool.size())];
            if (std::find(out.begin(), out.end(), tag) == out.end()) {
                out.emplace_back(tag);
            }
        }
    }
    return out;
}

}  // namespace rumorsim
