#include "rumorsim/memory.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "rumorsim/error.hpp"

namespace rumorsim {

std::uint64_t fnv1a64(std::span<unsigned char const> bytes, std::uint64_t seed) noexcept
{
    std::uint64_t h = seed;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t fnv1a64(std::string_view text) noexcept
{
    return fnv1a64(std::span<unsigned char const>(reinterpret_cast<unsigned char const*>(text.data()), text.size()));
}

HashingEmbedder::HashingEmbedder(std::size_t dimension, std::size_t ngram) : dimension_(dimension), ngram_(ngram)
{
    if (dimension_ == 0 || ngram_ == 0) {
        throw ConfigError("embedder dimension and n-gram size must be positive");
    }
}

Embedding HashingEmbedder::embed(std::string_view text) const
{
    std::string lowered(text);
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    std::vector<double> acc(dimension_, 0.0);
    std::string padded = " " + lowered + " ";
    if (!lowered.empty()) {
        std::size_t const n = std::min(ngram_, padded.size());
        for (std::size_t i = 0; i + n <= padded.size(); ++i) {
            acc[fnv1a64(std::string_view(padded).substr(i, n)) % dimension_] += 1.0;
        }
    }
    double norm = 0.0;
    for (double v : acc) {
        norm += v * v;
    }
    Embedding out(dimension_, 0.0f);
    if (norm == 0.0) {
        out[0] = 1.0f;
        return out;
    }
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < dimension_; ++i) {
        out[i] = static_cast<float>(acc[i] / norm);
    }
    return out;
}

ContentPtr make_content(std::string text, Embedder const& embedder)
{
    auto embedding = embedder.embed(text);
    return std::make_shared<MemoryContent const>(MemoryContent{std::move(text), std::move(embedding)});
}

MemoryRecord const& MemoryStore::add(MemoryRecord record)
{
    if (!record.content) {
        throw InterfaceError("memory record without content");
    }
    auto const& e = record.embedding();
    double norm = 0.0;
    for (float v : e) {
        norm += static_cast<double>(v) * v;
    }
    if (std::abs(std::sqrt(norm) - 1.0) > 1e-6) {
        throw InterfaceError("memory embedding is not unit norm");
    }
    if (!(record.importance >= 1.0 && record.importance <= 10.0)) {
        throw InterfaceError("memory importance outside [1, 10]");
    }
    MemoryRecord const* first = !personal_.empty() ? &personal_.front()
                                : !environmental_.empty() ? &environmental_.front()
                                                          : nullptr;
    if (first && first->embedding().size() != e.size()) {
        throw InterfaceError("memory embedding dimension mismatch");
    }
    record.sequence = next_sequence_++;
    auto& target = record.kind == MemoryKind::personal ? personal_ : environmental_;
    target.push_back(std::move(record));
    return target.back();
}

std::vector<MemoryRecord> MemoryStore::recent(std::size_t n) const
{
    std::vector<MemoryRecord> all;
    all.reserve(size());
    all.insert(all.end(), personal_.begin(), personal_.end());
    all.insert(all.end(), environmental_.begin(), environmental_.end());
    auto const newer = [](MemoryRecord const& a, MemoryRecord const& b) {
        return a.timestamp > b.timestamp || (a.timestamp == b.timestamp && a.sequence > b.sequence);
    };
    if (all.size() > n) {
        std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n), all.end(), newer);
        all.resize(n);
    } else {
        std::sort(all.begin(), all.end(), newer);
    }
    return all;
}

MemoryStore MemoryStore::restore(std::vector<MemoryRecord> personal, std::vector<MemoryRecord> environmental,
                                 std::uint64_t next_sequence)
{
    MemoryStore s;
    s.personal_ = std::move(personal);
    s.environmental_ = std::move(environmental);
    s.next_sequence_ = next_sequence;
    return s;
}

double cosine(std::span<float const> a, std::span<float const> b)
{
    if (a.size() != b.size()) {
        throw InterfaceError("embedding dimension mismatch: " + std::to_string(a.size()) + " vs "
                             + std::to_string(b.size()));
    }
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += static_cast<double>(a[i]) * b[i];
        na += static_cast<double>(a[i]) * a[i];
        nb += static_cast<double>(b[i]) * b[i];
    }
    if (na == 0.0 || nb == 0.0) {
        return 0.0;
    }
    return dot / std::sqrt(na * nb);
}

double retrieval_score(MemoryRecord const& record, std::span<float const> query, Step now, double decay)
{
    if (now < record.timestamp) {
        throw DomainError("retrieval time precedes the memory timestamp");
    }
    double const recency = std::pow(decay, static_cast<double>(now - record.timestamp));
    double const relevance = std::max(0.0, cosine(query, record.embedding()));
    return recency * relevance * record.importance;
}

std::vector<MemoryRecord> retrieve_top_k(MemoryStore const& store, std::span<float const> query, std::size_t k,
                                         Step now, double decay)
{
    struct Scored {
        double score;
        MemoryRecord const* record;
    };
    std::vector<Scored> scored;
    scored.reserve(store.size());
    for (auto const& r : store.personal()) {
        scored.push_back({retrieval_score(r, query, now, decay), &r});
    }
    for (auto const& r : store.environmental()) {
        scored.push_back({retrieval_score(r, query, now, decay), &r});
    }
    auto const better = [](Scored const& a, Scored const& b) {
        if (a.score != b.score) {
            return a.score > b.score;
        }
        if (a.record->timestamp != b.record->timestamp) {
            return a.record->timestamp > b.record->timestamp;
        }
        return a.record->sequence < b.record->sequence;
    };
    std::size_t const take = std::min(k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take), scored.end(), better);
    std::vector<MemoryRecord> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        out.push_back(*scored[i].record);
    }
    return out;
}

std::vector<MemoryRecord> retrieve_top_k(MemoryStore const& store, std::string_view query, std::size_t k, Step now,
                                         Embedder const& embedder, double decay)
{
    auto const q = embedder.embed(query);
    return retrieve_top_k(store, std::span<float const>(q), k, now, decay);
}

}  // namespace rumorsim
