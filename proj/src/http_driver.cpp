#include "rumorsim/http_driver.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"

#include "rumorsim/opinion.hpp"

namespace rumorsim {

using nlohmann::json;

HttpDriverConfig HttpDriverConfig::with_environment() const
{
    HttpDriverConfig c = *this;
    auto const env = [](char const* name) -> std::string {
        char const* v = std::getenv(name);
        return v ? v : "";
    };
    if (c.base_url.empty()) {
        c.base_url = env("DRIVER_BASE_URL");
    }
    if (c.model.empty()) {
        c.model = env("DRIVER_MODEL");
    }
    if (c.api_key.empty()) {
        c.api_key = env("DRIVER_API_KEY");
    }
    return c;
}

std::map<std::string, std::string> default_prompt_templates()
{
    return {
        {"act",
         "You are a user of a social media platform.\n{persona}\n\n"
         "Your current opinion on the topic, from -1 (certainly false) to 1 (certainly true): {opinion}\n\n"
         "What you remember:\n{memories}\n\n"
         "What is happening now:\n{environment}\n\n"
         "What your neighbors said:\n{digest}\n\n"
         "Choose one action: post, retweet, reply, like, do_nothing. Retweet, reply and like need the id of a "
         "tweet you remember as target. Answer with a JSON object "
         "{\"action\": ..., \"content\": ..., \"target\": ..., \"opinion_score\": ...} where opinion_score is the "
         "opinion your content expresses in [-1, 1]."},
        {"score_opinion",
         "Rate how strongly the following text claims the rumor is true, from -1 (certainly false) to 1 "
         "(certainly true), 0 if it takes no side.\n\nText: {text}\n\n"
         "Answer with a JSON object {\"opinion_score\": number}."},
        {"score_importance",
         "On a scale of 1 (mundane) to 10 (extremely poignant), rate the importance of this memory.\n\n"
         "Memory: {text}\n\nAnswer with a JSON object {\"importance\": number}."},
        {"questions",
         "Recent memories:\n{memories}\n\n"
         "Given only the memories above, what are the 3 most salient high-level questions we can answer about "
         "the subjects in them? Answer with a JSON object {\"questions\": [string, ...]}."},
        {"reflect",
         "Questions:\n{questions}\n\nStatements:\n{memories}\n\n"
         "What high-level insights can you infer from the statements above? Answer with a JSON object "
         "{\"insights\": [string, ...]}."},
        {"interests",
         "{persona}\n\nList 3 to 5 short interest tags this person is likely to have. Answer with a JSON object "
         "{\"interests\": [string, ...]}."},
    };
}

std::string fill_template(std::string_view tmpl, std::map<std::string, std::string> const& values)
{
    std::string out;
    out.reserve(tmpl.size());
    std::size_t i = 0;
    while (i < tmpl.size()) {
        if (tmpl[i] == '{') {
            auto const close = tmpl.find('}', i);
            if (close != std::string_view::npos) {
                auto const it = values.find(std::string(tmpl.substr(i + 1, close - i - 1)));
                if (it != values.end()) {
                    out += it->second;
                    i = close + 1;
                    continue;
                }
            }
        }
        out += tmpl[i++];
    }
    return out;
}

namespace {

std::string render_memories(std::span<MemoryRecord const> memories)
{
    std::ostringstream os;
    for (auto const& r : memories) {
        os << "- [step " << r.timestamp;
        if (r.tweet != kNoTweet) {
            os << ", tweet " << r.tweet;
        }
        os << "] " << r.text() << '\n';
    }
    return os.str();
}

std::string render_list(std::span<std::string const> items)
{
    std::ostringstream os;
    for (auto const& s : items) {
        os << "- " << s << '\n';
    }
    return os.str();
}

/// Model replies sometimes wrap JSON in prose or code fences.
json extract_json(std::string const& text)
{
    auto const first = text.find('{');
    auto const last = text.rfind('}');
    if (first == std::string::npos || last == std::string::npos || last < first) {
        throw DriverError("reply contains no JSON object");
    }
    try {
        return json::parse(text.substr(first, last - first + 1));
    } catch (json::exception const& e) {
        throw DriverError(std::string("unparseable reply: ") + e.what());
    }
}

double number_field(json const& j, char const* key)
{
    auto const it = j.find(key);
    if (it == j.end() || !it->is_number()) {
        throw DriverError(std::string("reply lacks numeric ") + key);
    }
    return it->get<double>();
}

std::vector<std::string> string_list(json const& j, char const* key)
{
    auto const it = j.find(key);
    if (it == j.end() || !it->is_array()) {
        throw DriverError(std::string("reply lacks list ") + key);
    }
    std::vector<std::string> out;
    for (auto const& v : *it) {
        if (v.is_string()) {
            out.push_back(v.get<std::string>());
        }
    }
    return out;
}

/// A reply that could be read but not used; retried, then reported.
class ParseFailure : public DriverError {
  public:
    using DriverError::DriverError;
};

}  // namespace

HttpDriver::HttpDriver(HttpDriverConfig config) : config_(config.with_environment()), templates_(default_prompt_templates())
{
    if (config_.base_url.empty()) {
        throw ConfigError("http driver: base URL missing (set driver.http.base_url or DRIVER_BASE_URL)");
    }
    if (config_.max_attempts < 1) {
        throw ConfigError("http driver: max_attempts must be >= 1");
    }
    if (!config_.prompt_dir.empty()) {
        for (auto& [name, text] : templates_) {
            std::ifstream in(config_.prompt_dir + "/" + name + ".txt");
            if (in) {
                std::ostringstream os;
                os << in.rdbuf();
                text = os.str();
            }
        }
    }
    // Split "http://host:port/prefix" into client base and path prefix.
    auto const scheme_end = config_.base_url.find("://");
    auto const host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    auto const path_start = config_.base_url.find('/', host_start);
    scheme_host_ = config_.base_url.substr(0, path_start);
    path_prefix_ = path_start == std::string::npos ? "" : config_.base_url.substr(path_start);
    while (!path_prefix_.empty() && path_prefix_.back() == '/') {
        path_prefix_.pop_back();
    }
}

std::string HttpDriver::complete(std::string const& prompt, std::uint64_t seed)
{
    httplib::Client client(scheme_host_);
    auto const timeout = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::duration<double>(config_.timeout_seconds));
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    if (!config_.api_key.empty()) {
        client.set_bearer_token_auth(config_.api_key);
    }
    json body = {
        {"model", config_.model},
        {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
        {"temperature", 0},
        {"seed", seed & 0x7fffffffffffffffull},
        {"response_format", json{{"type", "json_object"}}},
    };
    auto res = client.Post(path_prefix_ + "/chat/completions", body.dump(), "application/json");
    if (!res) {
        throw DriverUnavailable("http driver: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        throw DriverUnavailable("http driver: status " + std::to_string(res->status));
    }
    try {
        auto const reply = json::parse(res->body);
        return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (json::exception const& e) {
        throw ParseFailure(std::string("malformed completion: ") + e.what());
    }
}

template <class Parse>
auto HttpDriver::ask(std::string const& prompt, std::uint64_t seed, Parse&& parse) -> decltype(parse(std::string{}))
{
    auto delay = config_.backoff;
    for (int attempt = 1;; ++attempt) {
        try {
            return parse(complete(prompt, seed));
        } catch (DriverError const& e) {
            if (attempt >= config_.max_attempts) {
                throw;
            }
            std::clog << "warning: http driver attempt " << attempt << " failed: " << e.what() << '\n';
        }
        std::this_thread::sleep_for(delay);
        delay *= 2;
    }
}

Action HttpDriver::generate_action(ActionRequest const& request)
{
    std::ostringstream opinion;
    opinion << request.opinion;
    auto const prompt = fill_template(templates_.at("act"), {
                                                                {"persona", describe(request.persona)},
                                                                {"opinion", opinion.str()},
                                                                {"memories", render_memories(request.memories)},
                                                                {"environment", std::string(request.environment)},
                                                                {"digest", request.digest.text},
                                                            });
    try {
        return ask(prompt, request.seed, [](std::string const& reply) {
            auto const j = extract_json(reply);
            Action a;
            auto const kind = parse_action_kind(j.value("action", std::string{}));
            if (!kind) {
                throw ParseFailure("unknown action");
            }
            a.kind = *kind;
            if (auto it = j.find("content"); it != j.end() && it->is_string()) {
                a.content = it->get<std::string>();
            }
            if (auto it = j.find("target"); it != j.end() && it->is_number_integer() && it->get<std::int64_t>() > 0) {
                a.target = it->get<TweetId>();
            }
            if (auto it = j.find("opinion_score"); it != j.end() && it->is_number()) {
                a.opinion_score = clamp_opinion(it->get<double>());
            }
            if (a.kind == ActionKind::like || a.kind == ActionKind::do_nothing) {
                a.content.clear();
            }
            if (a.kind == ActionKind::post || a.kind == ActionKind::do_nothing) {
                a.target.reset();
            }
            return a;
        });
    } catch (DriverUnavailable const&) {
        throw;
    } catch (DriverError const& e) {
        std::clog << "warning: http driver gave no usable action: " << e.what() << '\n';
        return Action::nothing();
    }
}

double HttpDriver::score_opinion(std::string_view text)
{
    auto const prompt = fill_template(templates_.at("score_opinion"), {{"text", std::string(text)}});
    return ask(prompt, fnv1a64(text), [](std::string const& reply) {
        return clamp_opinion(number_field(extract_json(reply), "opinion_score"));
    });
}

double HttpDriver::score_importance(std::string_view text)
{
    auto const prompt = fill_template(templates_.at("score_importance"), {{"text", std::string(text)}});
    return ask(prompt, fnv1a64(text), [](std::string const& reply) {
        return std::clamp(number_field(extract_json(reply), "importance"), 1.0, 10.0);
    });
}

std::vector<std::string> HttpDriver::generate_questions(std::span<MemoryRecord const> recent)
{
    auto const prompt = fill_template(templates_.at("questions"), {{"memories", render_memories(recent)}});
    return ask(prompt, fnv1a64(prompt),
               [](std::string const& reply) { return string_list(extract_json(reply), "questions"); });
}

std::vector<std::string> HttpDriver::reflect(std::span<std::string const> questions,
                                             std::span<MemoryRecord const> memories)
{
    auto const prompt = fill_template(templates_.at("reflect"), {
                                                                    {"questions", render_list(questions)},
                                                                    {"memories", render_memories(memories)},
                                                                });
    return ask(prompt, fnv1a64(prompt),
               [](std::string const& reply) { return string_list(extract_json(reply), "insights"); });
}

std::vector<std::string> HttpDriver::infer_interests(Persona const& persona, std::uint64_t seed)
{
    auto const prompt = fill_template(templates_.at("interests"), {{"persona", describe(persona)}});
    auto tags = ask(prompt, seed, [](std::string const& reply) {
        auto t = string_list(extract_json(reply), "interests");
        if (t.size() < 3) {
            throw ParseFailure("fewer than 3 interests");
        }
        return t;
    });
    if (tags.size() > 5) {
        tags.resize(5);
    }
    return tags;
}

}  // namespace rumorsim
