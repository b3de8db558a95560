#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rumorsim/types.hpp"

namespace rumorsim {

using Embedding = std::vector<float>;

/// Text plus its embedding. Shared between every record that observed the same text.
struct MemoryContent {
    std::string text;
    Embedding embedding;
};

using ContentPtr = std::shared_ptr<MemoryContent const>;

enum class MemoryKind : std::uint8_t { personal = 0, environmental = 1 };

/// One memory: content, embedding, importance in [1, 10], and the step it was written.
struct MemoryRecord {
    ContentPtr content;
    double importance = 1.0;
    Step timestamp = 0;
    MemoryKind kind = MemoryKind::personal;
    TweetId tweet = kNoTweet;     ///< source tweet for environmental records
    std::uint64_t sequence = 0;   ///< insertion order within the owning store

    std::string const& text() const noexcept { return content->text; }
    Embedding const& embedding() const noexcept { return content->embedding; }
};

class Embedder {
  public:
    virtual ~Embedder() = default;
    virtual std::size_t dimension() const noexcept = 0;
    /// Unit-norm embedding; must be deterministic per input text.
    virtual Embedding embed(std::string_view text) const = 0;
};

/*!
 * Feature-hashed character n-grams, L2 normalized.
 *
 * Counts are non-negative so cosine similarity lies in [0, 1]. Empty text
 * maps to the first basis vector.
 */
class HashingEmbedder final : public Embedder {
  public:
    explicit HashingEmbedder(std::size_t dimension = 64, std::size_t ngram = 3);
    std::size_t dimension() const noexcept override { return dimension_; }
    Embedding embed(std::string_view text) const override;

  private:
    std::size_t dimension_;
    std::size_t ngram_;
};

ContentPtr make_content(std::string text, Embedder const& embedder);

/// Personal and environmental memories of one agent.
class MemoryStore {
  public:
    /// Validates the record invariants and assigns the insertion sequence.
    MemoryRecord const& add(MemoryRecord record);

    std::span<MemoryRecord const> personal() const noexcept { return personal_; }
    std::span<MemoryRecord const> environmental() const noexcept { return environmental_; }

    std::size_t size() const noexcept { return personal_.size() + environmental_.size(); }
    bool empty() const noexcept { return size() == 0; }

    /// The n most recent records across both stores (newest first).
    std::vector<MemoryRecord> recent(std::size_t n) const;

    std::uint64_t next_sequence() const noexcept { return next_sequence_; }

    /// Rebuild from serialized parts; sequences are taken as stored.
    static MemoryStore restore(std::vector<MemoryRecord> personal, std::vector<MemoryRecord> environmental,
                               std::uint64_t next_sequence);

  private:
    std::vector<MemoryRecord> personal_;
    std::vector<MemoryRecord> environmental_;
    std::uint64_t next_sequence_ = 0;
};

/// Cosine similarity. Throws InterfaceError on dimension mismatch.
double cosine(std::span<float const> a, std::span<float const> b);

/// decay^(now - t) * max(0, cosine) * importance.
double retrieval_score(MemoryRecord const& record, std::span<float const> query, Step now, double decay);

/// Highest retrieval scores first; ties to the newer record, then to earlier insertion.
std::vector<MemoryRecord> retrieve_top_k(MemoryStore const& store, std::span<float const> query, std::size_t k,
                                         Step now, double decay);

std::vector<MemoryRecord> retrieve_top_k(MemoryStore const& store, std::string_view query, std::size_t k, Step now,
                                         Embedder const& embedder, double decay);

/// 64-bit FNV-1a, used for hashing features and checksums.
std::uint64_t fnv1a64(std::span<unsigned char const> bytes, std::uint64_t seed = 0xcbf29ce484222325ull) noexcept;
std::uint64_t fnv1a64(std::string_view text) noexcept;

}  // namespace rumorsim
