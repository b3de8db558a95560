#pragma once

#include <chrono>
#include <map>
#include <string>
#include <string_view>

#include "rumorsim/driver.hpp"

namespace rumorsim {

struct HttpDriverConfig {
    std::string base_url;  ///< e.g. http://localhost:8000/v1; DRIVER_BASE_URL when empty
    std::string model;     ///< DRIVER_MODEL when empty
    std::string api_key;   ///< DRIVER_API_KEY when empty
    double timeout_seconds = 60.0;
    int max_attempts = 3;
    std::chrono::milliseconds backoff{500};  ///< doubled after each failed attempt
    std::string prompt_dir;  ///< overrides for the built-in templates, one <name>.txt each

    /// Fill empty fields from the environment.
    HttpDriverConfig with_environment() const;
};

/// Template names: act, score_opinion, score_importance, questions, reflect, interests.
std::map<std::string, std::string> default_prompt_templates();

/// Replace every {key} in a template.
std::string fill_template(std::string_view tmpl, std::map<std::string, std::string> const& values);

/*!
 * Driver backed by an OpenAI-style chat-completion endpoint.
 *
 * Every call asks for a JSON object. Actions use the schema
 * {action, content, target, opinion_score}. Transport failures and
 * unparseable replies are retried with exponential backoff; transport
 * failures past the budget raise DriverUnavailable, unparseable replies
 * become DoNothing (actions) or a DriverError (everything else).
 */
class HttpDriver final : public Driver {
  public:
    explicit HttpDriver(HttpDriverConfig config);

    Action generate_action(ActionRequest const& request) override;
    double score_opinion(std::string_view text) override;
    double score_importance(std::string_view text) override;
    std::vector<std::string> generate_questions(std::span<MemoryRecord const> recent) override;
    std::vector<std::string> reflect(std::span<std::string const> questions,
                                     std::span<MemoryRecord const> memories) override;
    std::vector<std::string> infer_interests(Persona const& persona, std::uint64_t seed) override;

    HttpDriverConfig const& config() const noexcept { return config_; }

  private:
    template <class Parse>
    auto ask(std::string const& prompt, std::uint64_t seed, Parse&& parse) -> decltype(parse(std::string{}));
    std::string complete(std::string const& prompt, std::uint64_t seed);

    HttpDriverConfig config_;
    std::map<std::string, std::string> templates_;
    std::string scheme_host_;
    std::string path_prefix_;
};

}  // namespace rumorsim
