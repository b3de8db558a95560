#include "rumorsim/persona.hpp"

#include <cmath>
#include <sstream>

#include "rumorsim/driver.hpp"
#include "rumorsim/error.hpp"
#include "rumorsim/rng.hpp"

namespace rumorsim {

std::string_view to_string(Gender g) noexcept
{
    switch (g) {
    case Gender::female:
        return "female";
    case Gender::male:
        return "male";
    case Gender::nonbinary:
        return "nonbinary";
    }
    return "unknown";
}

PersonaConfig PersonaConfig::defaults()
{
    PersonaConfig c;
    c.names = {"Alex",   "Jordan", "Taylor", "Morgan", "Casey",  "Riley", "Jamie",  "Avery",
               "Quinn",  "Parker", "Rowan",  "Skyler", "Dakota", "Reese", "Emerson", "Finley",
               "Hayden", "Kendall", "Logan", "Sasha",  "Robin",  "Drew",  "Cameron", "Elliot"};
    c.occupations = {"teacher",    "nurse",      "software engineer", "accountant", "journalist",
                     "student",    "farmer",     "shop owner",        "lawyer",     "retiree",
                     "designer",   "mechanic",   "civil servant",     "researcher", "chef",
                     "sales clerk", "driver",    "doctor",            "artist",     "consultant"};
    return c;
}

void PersonaConfig::validate() const
{
    if (names.empty()) {
        throw ConfigError("persona name pool is empty");
    }
    if (occupations.empty()) {
        throw ConfigError("persona occupation pool is empty");
    }
    if (!(age_stddev > 0.0)) {
        throw ConfigError("persona age stddev must be positive");
    }
    if (age_min > age_max) {
        throw ConfigError("persona age bounds are inverted");
    }
}

double sample_truncated_normal(std::uint64_t seed, double mean, double stddev, double lo, double hi)
{
    CounterRng rng{mix64(seed)};
    for (int attempt = 0; attempt < 10'000; ++attempt) {
        double const x = mean + stddev * rng.normal();
        if (x >= lo && x <= hi) {
            return x;
        }
    }
    // Bounds far in a tail: fall back to uniform within them.
    return rng.uniform(lo, hi);
}

Persona make_persona(std::uint64_t seed, PersonaConfig const& config, Driver& driver)
{
    config.validate();
    CounterRng rng{mix64(seed ^ 0x5045525341ull)};
    Persona p;
    p.name = config.names[rng.below(config.names.size())];
    double const g = rng.uniform();
    p.gender = g < 0.48 ? Gender::female : g < 0.96 ? Gender::male : Gender::nonbinary;
    double const age = sample_truncated_normal(rng(), config.age_mean, config.age_stddev, config.age_min,
                                               config.age_max);
    p.age = static_cast<int>(std::lround(age));
    p.occupation = config.occupations[rng.below(config.occupations.size())];
    p.traits.openness = rng.uniform();
    p.traits.conscientiousness = rng.uniform();
    p.traits.extraversion = rng.uniform();
    p.traits.agreeableness = rng.uniform();
    p.traits.neuroticism = rng.uniform();
    p.interests = driver.infer_interests(p, rng());
    if (p.interests.size() < 3 || p.interests.size() > 5) {
        throw DriverError("driver returned " + std::to_string(p.interests.size()) + " interests, expected 3-5");
    }
    return p;
}

std::string describe(Persona const& p)
{
    std::ostringstream os;
    os << p.name << " is a " << p.age << "-year-old " << to_string(p.gender) << ' ' << p.occupation
       << ". Interests: ";
    for (std::size_t i = 0; i < p.interests.size(); ++i) {
        os << (i ? ", " : "") << p.interests[i];
    }
    os.precision(2);
    os << std::fixed << ". Personality (0-1): openness " << p.traits.openness << ", conscientiousness "
       << p.traits.conscientiousness << ", extraversion " << p.traits.extraversion << ", agreeableness "
       << p.traits.agreeableness << ", neuroticism " << p.traits.neuroticism << '.';
    return os.str();
}

}  // namespace rumorsim
