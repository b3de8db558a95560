#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace rumorsim {

class Driver;

enum class Gender : std::uint8_t { female = 0, male = 1, nonbinary = 2 };

std::string_view to_string(Gender g) noexcept;

/// Big Five traits, each in [0, 1].
struct BigFive {
    double openness = 0.5;
    double conscientiousness = 0.5;
    double extraversion = 0.5;
    double agreeableness = 0.5;
    double neuroticism = 0.5;

    std::array<double, 5> as_array() const noexcept
    {
        return {openness, conscientiousness, extraversion, agreeableness, neuroticism};
    }
    friend bool operator==(BigFive const&, BigFive const&) = default;
};

struct Persona {
    std::string name;
    Gender gender = Gender::female;
    int age = 30;
    std::string occupation;
    std::vector<std::string> interests;  ///< 3 to 5 tags
    BigFive traits;

    friend bool operator==(Persona const&, Persona const&) = default;
};

struct PersonaConfig {
    std::vector<std::string> names;
    std::vector<std::string> occupations;
    double age_mean = 35.0;
    double age_stddev = 12.0;
    int age_min = 18;
    int age_max = 80;

    /// Built-in name and occupation pools.
    static PersonaConfig defaults();
    void validate() const;
};

/// Sample the continuous truncated normal used for ages.
double sample_truncated_normal(std::uint64_t seed, double mean, double stddev, double lo, double hi);

/// Deterministic persona for the seed; interests come from the driver.
Persona make_persona(std::uint64_t seed, PersonaConfig const& config, Driver& driver);

/// One-paragraph profile used in prompts.
std::string describe(Persona const& p);

}  // namespace rumorsim
