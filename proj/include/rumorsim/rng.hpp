#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace rumorsim {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/*!
 * Counter-based generator: the n-th output is a pure function of (key, n).
 *
 * The whole state is the pair (key, counter), so streams can be derived for
 * any (agent, step, purpose) without touching a shared sequence, and saved
 * exactly in checkpoints.
 */
class CounterRng {
  public:
    using result_type = std::uint64_t;

    constexpr explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0) noexcept
        : key_(key), counter_(counter)
    {
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept
    {
        ++counter_;
        return mix64(key_ + counter_ * 0x9e3779b97f4a7c15ull);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n); n must be positive.
    std::uint64_t below(std::uint64_t n) noexcept
    {
        // Rejection on the largest multiple of n keeps the draw unbiased.
        std::uint64_t const limit = max() - max() % n;
        std::uint64_t x = (*this)();
        while (x >= limit) {
            x = (*this)();
        }
        return x % n;
    }

    bool bernoulli(double p) noexcept { return uniform() < p; }

    /// Standard normal via Box-Muller; consumes two outputs per call.
    double normal() noexcept
    {
        double u1 = uniform();
        double const u2 = uniform();
        if (u1 <= 0.0) {
            u1 = 0x1.0p-53;
        }
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    constexpr std::uint64_t key() const noexcept { return key_; }
    constexpr std::uint64_t counter() const noexcept { return counter_; }

  private:
    std::uint64_t key_;
    std::uint64_t counter_;
};

/// Independent stream purposes. Values are part of the checkpoint contract.
enum class StreamPurpose : std::uint64_t {
    network = 1,
    initial_opinion = 2,
    deffuant_params = 3,
    persona = 4,
    action = 5,
    path_sampling = 6,
    seed_group = 7,
};

/// Derive the stream for one (purpose, agent, step) triple from the master seed.
constexpr CounterRng derive_stream(std::uint64_t master_seed, StreamPurpose purpose,
                                   std::uint64_t agent = 0, std::uint64_t step = 0) noexcept
{
    std::uint64_t key = mix64(master_seed ^ 0x6a09e667f3bcc909ull);
    key = mix64(key ^ (static_cast<std::uint64_t>(purpose) * 0xbb67ae8584caa73bull));
    key = mix64(key ^ (agent * 0x3c6ef372fe94f82bull));
    key = mix64(key ^ (step * 0xa54ff53a5f1d36f1ull));
    return CounterRng{key};
}

}  // namespace rumorsim
